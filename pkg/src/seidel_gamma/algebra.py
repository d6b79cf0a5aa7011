"""Small quantum homology algebras over the Novikov field.

Three presentations are supported: complex projective space, the even
Hirzebruch surface S^2 x S^2 and the odd Hirzebruch surface (the one-point
blow-up of CP^2).  A presentation fixes mu, a precision floor, an ordered
homology basis and the full multiplication table in that basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidParameterError, NotInvertibleError, ParameterMismatchError
from .novikov import (
    MIXED,
    NEG_INFINITY,
    AffineExponent,
    NovikovScalar,
    as_rational,
    default_window,
    scalar_div,
    scalar_invert,
)

__all__ = [
    "AlgebraPresentation",
    "BasisClass",
    "DegreeCheck",
    "QuantumClass",
    "degree_check",
    "invert",
    "make_cpn",
    "make_even_hirzebruch",
    "make_odd_hirzebruch",
    "mul",
    "power",
    "val",
]

CPN = "cpn"
EVEN = "even-hirzebruch"
ODD = "odd-hirzebruch"

MU = AffineExponent(0, 1)
T = AffineExponent(1, 0)


@dataclass(frozen=True)
class BasisClass:
    """A homology class with the power of q baked into it (``u = F (x) q``)."""

    name: str
    homological_degree: int
    q_shift: int = 0

    @property
    def total_degree(self) -> int:
        return self.homological_degree + 2 * self.q_shift


@dataclass(frozen=True, eq=False)
class AlgebraPresentation:
    """Basis, structure constants and parameters of one quantum homology algebra.

    ``table[i][j]`` holds the coordinates of ``basis[i] * basis[j]``.
    ``q_per_t`` is the q-degree carried by ``t^1``: in the monotone
    description of CP^n the variable ``s = q^(n+1) t`` hides a power of q
    behind every power of t, while for the Hirzebruch surfaces the q's are
    already part of the basis classes.
    """

    manifold: str
    mu: Fraction | None
    floor: Fraction
    basis: tuple
    table: tuple
    unit_index: int
    dim: int
    q_per_t: Fraction
    period_lattice: str
    n: int | None = None
    label: str = ""
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index.update({b.name: i for i, b in enumerate(self.basis)})

    @property
    def key(self):
        return (self.manifold, self.n, self.mu, self.floor, self.label)

    @property
    def size(self) -> int:
        return len(self.basis)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"{name!r} is not a basis class of {self.manifold}") from None

    def scalar(self, coeff=1, exponent=AffineExponent()) -> NovikovScalar:
        return NovikovScalar.monomial(coeff, exponent, self.mu, self.floor)

    def zero_scalar(self) -> NovikovScalar:
        return NovikovScalar.zero(self.mu, self.floor)

    def zero(self) -> QuantumClass:
        return QuantumClass(tuple(self.zero_scalar() for _ in self.basis), self)

    def unit(self) -> QuantumClass:
        return self.element(self.basis[self.unit_index].name)

    def element(self, name: str, coeff=1, exponent=AffineExponent()) -> QuantumClass:
        """``coeff * name * t^exponent``."""
        i = self.index(name)
        coords = [self.zero_scalar() for _ in self.basis]
        coords[i] = self.scalar(coeff, exponent)
        return QuantumClass(tuple(coords), self)

    def from_coords(self, coords: dict) -> QuantumClass:
        """Build an element from ``{basis name: NovikovScalar}``."""
        out = [self.zero_scalar() for _ in self.basis]
        for name, s in coords.items():
            out[self.index(name)] = s
        return QuantumClass(tuple(out), self)

    def with_floor(self, floor) -> AlgebraPresentation:
        """The same algebra with every structure constant moved to a new floor."""
        floor = as_rational(floor)
        if floor == self.floor:
            return self
        table = tuple(tuple(tuple(s.with_floor(floor) for s in entry) for entry in row)
                      for row in self.table)
        return AlgebraPresentation(self.manifold, self.mu, floor, self.basis, table,
                                   self.unit_index, self.dim, self.q_per_t,
                                   self.period_lattice, self.n, self.label)

    def with_entry(self, left: str, right: str, value: QuantumClass,
                   label: str = "modified") -> AlgebraPresentation:
        """Copy with ``left * right`` (and its mirror) replaced; used for fixtures."""
        i, j = self.index(left), self.index(right)
        rows = [list(r) for r in self.table]
        rows[i][j] = value.coords
        rows[j][i] = value.coords
        return AlgebraPresentation(self.manifold, self.mu, self.floor, self.basis,
                                   tuple(tuple(r) for r in rows), self.unit_index,
                                   self.dim, self.q_per_t, self.period_lattice,
                                   self.n, label)

    def __repr__(self):
        params = f"n={self.n}" if self.manifold == CPN else f"mu={self.mu}"
        return f"AlgebraPresentation({self.manifold}, {params}, floor={self.floor})"


class QuantumClass:
    """An element ``sum_i coords[i] * basis[i]`` of a presentation."""

    __slots__ = ("coords", "presentation")

    def __init__(self, coords, presentation: AlgebraPresentation):
        coords = tuple(coords)
        if len(coords) != presentation.size:
            raise ValueError("coordinate vector does not match the basis")
        self.coords = coords
        self.presentation = presentation

    def _compatible(self, other):
        if not isinstance(other, QuantumClass):
            raise TypeError("expected a QuantumClass")
        p, q = self.presentation, other.presentation
        if p is not q and p.key != q.key:
            raise ParameterMismatchError(f"{p!r} and {q!r} differ")

    def __getitem__(self, name: str) -> NovikovScalar:
        return self.coords[self.presentation.index(name)]

    def __add__(self, other):
        self._compatible(other)
        return QuantumClass(tuple(a + b for a, b in zip(self.coords, other.coords)),
                            self.presentation)

    def __neg__(self):
        return QuantumClass(tuple(-a for a in self.coords), self.presentation)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, QuantumClass):
            return mul(self, other)
        if isinstance(other, NovikovScalar):
            return QuantumClass(tuple(a * other for a in self.coords), self.presentation)
        if isinstance(other, (int, Fraction)):
            return QuantumClass(tuple(a.scale(other) for a in self.coords), self.presentation)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (NovikovScalar, int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        return power(self, k)

    def shift(self, exponent) -> QuantumClass:
        """Multiply by ``t^exponent``."""
        return QuantumClass(tuple(a.shift(exponent) for a in self.coords), self.presentation)

    def with_floor(self, floor) -> QuantumClass:
        pres = self.presentation.with_floor(floor)
        return QuantumClass(tuple(a.with_floor(pres.floor) for a in self.coords), pres)

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coords)

    def val(self):
        return val(self)

    def leading_tag(self):
        """Affine form of the valuation, or MIXED when it is not unambiguous."""
        v = val(self)
        if v == NEG_INFINITY:
            return MIXED
        tags = {a.leading_term()[2] for a in self.coords if a.valuation() == v}
        if len(tags) != 1:
            return MIXED
        return tags.pop()

    def __eq__(self, other):
        if not isinstance(other, QuantumClass):
            return NotImplemented
        return self.presentation.key == other.presentation.key and self.coords == other.coords

    def __hash__(self):
        return hash((self.presentation.key, self.coords))

    def __repr__(self):
        parts = [f"{b.name}*({a!r})" for b, a in zip(self.presentation.basis, self.coords)
                 if not a.is_zero()]
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# products


def mul(a: QuantumClass, b: QuantumClass) -> QuantumClass:
    """Quantum product, the bilinear extension of the structure constants."""
    a._compatible(b)
    pres = a.presentation
    n = pres.size
    acc = [pres.zero_scalar() for _ in range(n)]
    for i, x in enumerate(a.coords):
        if x.is_zero():
            continue
        row = pres.table[i]
        for j, y in enumerate(b.coords):
            if y.is_zero():
                continue
            xy = x * y
            if xy.is_zero():
                continue
            for k, c in enumerate(row[j]):
                if not c.is_zero():
                    acc[k] = acc[k] + xy * c
    return QuantumClass(tuple(acc), pres)


def power(a: QuantumClass, k: int) -> QuantumClass:
    """``a^k`` by iterated multiplication; negative ``k`` inverts first."""
    if k == 0:
        return a.presentation.unit()
    base = a if k > 0 else invert(a)
    out = base
    for _ in range(abs(k) - 1):
        out = mul(out, base)
    return out


def val(a: QuantumClass):
    """Largest valuation over the coordinates; ``NEG_INFINITY`` for zero."""
    return max((c.valuation() for c in a.coords), default=NEG_INFINITY)


def invert(a: QuantumClass) -> QuantumClass:
    """Inverse of ``a`` to working precision.

    The odd Hirzebruch generator ``u`` uses ``u^-1 = u0 t^(mu+1)`` directly.
    Everything else solves ``a * x = 1`` by Gaussian elimination with the
    pivot of largest valuation, carried out below the floor by a safety
    margin and truncated afterwards.
    """
    pres = a.presentation
    if a.is_zero():
        raise NotInvertibleError("the zero class is not invertible", zero_divisor=True)
    if pres.manifold == ODD and a == pres.element("u"):
        return pres.element("u0", 1, MU + T)
    return _solve_inverse(a)


def _margin(a: QuantumClass, matrix) -> Fraction:
    biggest = Fraction(1)
    for row in matrix:
        for s in row:
            if not s.is_zero():
                biggest = max(biggest, abs(s.valuation()), abs(s.lowest_exponent()))
    return 2 * len(matrix) * biggest + 1


def _solve_inverse(a: QuantumClass, extra=1) -> QuantumClass:
    pres = a.presentation
    n = pres.size
    basis_elts = [pres.element(b.name) for b in pres.basis]
    columns = [mul(a, e).coords for e in basis_elts]
    matrix = [[columns[j][i] for j in range(n)] for i in range(n)]
    work_floor = pres.floor - extra * _margin(a, matrix)

    solve = _adjugate_solve if n <= ADJUGATE_MAX_SIZE else _eliminate
    x, failed_at = solve(matrix, pres, work_floor)
    if x is None:
        retry, failed_again = solve(matrix, pres, pres.floor - 2 * (pres.floor - work_floor))
        if retry is None:
            same = failed_again == failed_at
            kind = "zero divisor" if same else "window too small"
            raise NotInvertibleError(
                f"{kind}: no usable pivot ({failed_at}; "
                f"after enlarging the window: {failed_again})",
                zero_divisor=same)
        x = retry
    return QuantumClass(tuple(s.with_floor(pres.floor) for s in x), pres)


# up to this size the inverse is adjugate / determinant: only finite
# polynomials are multiplied and a single series division per coordinate
ADJUGATE_MAX_SIZE = 4


def _det(rows, row_ids, col_ids, memo):
    """Determinant of the minor on ``row_ids`` x ``col_ids`` by cofactor expansion."""
    key = (row_ids, col_ids)
    if key in memo:
        return memo[key]
    r0, rest = row_ids[0], row_ids[1:]
    if not rest:
        out = rows[r0][col_ids[0]]
    else:
        out = None
        for k, c in enumerate(col_ids):
            entry = rows[r0][c]
            if entry.is_zero():
                continue
            term = entry * _det(rows, rest, col_ids[:k] + col_ids[k + 1:], memo)
            if k % 2:
                term = -term
            out = term if out is None else out + term
        if out is None:
            out = rows[r0][col_ids[0]].scale(0)
    memo[key] = out
    return out


def _adjugate_solve(matrix, pres, work_floor):
    """Solve ``M x = e_unit`` as ``x = adj(M) e_unit / det(M)``."""
    n = len(matrix)
    rows = [[s.with_floor(work_floor) for s in row] for row in matrix]
    memo = {}
    all_rows, all_cols = tuple(range(n)), tuple(range(n))
    det = _det(rows, all_rows, all_cols, memo)
    v = det.valuation()
    # a determinant living entirely below the user floor is numerical noise
    if v == NEG_INFINITY or v < pres.floor:
        return None, "determinant"
    u = pres.unit_index
    minor_rows = all_rows[:u] + all_rows[u + 1:]
    x = []
    for i in range(n):
        cof = _det(rows, minor_rows, all_cols[:i] + all_cols[i + 1:], memo)
        if (u + i) % 2:
            cof = -cof
        x.append(scalar_div(cof, det))
    return x, None


def _eliminate(matrix, pres, work_floor):
    n = len(matrix)
    rows = [[s.with_floor(work_floor) for s in row] for row in matrix]
    rhs = [NovikovScalar.zero(pres.mu, work_floor) for _ in range(n)]
    rhs[pres.unit_index] = NovikovScalar.one(pres.mu, work_floor)

    for col in range(n):
        best, best_val = None, None
        for r in range(col, n):
            v = rows[r][col].valuation()
            # a pivot living entirely below the user floor is numerical noise
            if v != NEG_INFINITY and v >= pres.floor and (best_val is None or v > best_val):
                best, best_val = r, v
        if best is None:
            return None, f"column {col}"
        rows[col], rows[best] = rows[best], rows[col]
        rhs[col], rhs[best] = rhs[best], rhs[col]
        inv = scalar_invert(rows[col][col])
        rows[col] = [s * inv for s in rows[col]]
        rhs[col] = rhs[col] * inv
        for r in range(n):
            if r == col or rows[r][col].is_zero():
                continue
            f = rows[r][col]
            rows[r] = [s - f * t for s, t in zip(rows[r], rows[col])]
            rhs[r] = rhs[r] - f * rhs[col]
    return rhs, None


# ---------------------------------------------------------------------------
# degree bookkeeping


@dataclass
class DegreeCheck:
    """Outcome of :func:`degree_check`; truthy iff the table is homogeneous."""

    ok: bool
    offending: list

    def __bool__(self):
        return self.ok


def degree_check(pres: AlgebraPresentation) -> DegreeCheck:
    """Check ``deg(a*b) = deg(a) + deg(b) - dim`` on every table entry.

    A term ``c t^k`` in front of basis class ``e`` has total degree
    ``deg(e) + 2 * q_per_t * k``; that q-degree has to be an integer.
    """
    bad = []
    for i, bi in enumerate(pres.basis):
        for j, bj in enumerate(pres.basis):
            want = bi.total_degree + bj.total_degree - pres.dim
            for k, s in enumerate(pres.table[i][j]):
                for exp, _, _ in s.items():
                    q = pres.q_per_t * exp
                    got = pres.basis[k].total_degree + 2 * q
                    if q.denominator != 1 or got != want:
                        bad.append({"left": bi.name, "right": bj.name,
                                    "term": f"{pres.basis[k].name}*t^({exp})",
                                    "expected_degree": want, "degree": str(got)})
    return DegreeCheck(not bad, bad)


# ---------------------------------------------------------------------------
# the three presentations


def _build(manifold, mu, floor, basis, entry, dim, q_per_t, lattice, n=None):
    size = len(basis)
    table = tuple(tuple(entry(i, j) for j in range(size)) for i in range(size))
    return AlgebraPresentation(manifold, mu, floor, tuple(basis), table, 0, dim,
                               Fraction(q_per_t), lattice, n)


def _mono_vector(size, mu, floor, k, coeff=1, exponent=AffineExponent()):
    v = [NovikovScalar.zero(mu, floor) for _ in range(size)]
    v[k] = NovikovScalar.monomial(coeff, exponent, mu, floor)
    return tuple(v)


def _floor_for(mu, floor):
    return -default_window(mu, 0) if floor is None else as_rational(floor)


def make_cpn(n: int, floor=None) -> AlgebraPresentation:
    """``Q[A]/(A^(n+1) = s^-1)`` with ``s = t^Omega`` and ``Omega = 1``.

    Basis ``1, A, A^2, ..., A^n``; ``A^k`` has degree ``2n - 2k``.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InvalidParameterError("n must be an integer >= 1")
    floor = _floor_for(None, floor)
    basis = [BasisClass("1", 2 * n)] + [
        BasisClass("A" if k == 1 else f"A^{k}", 2 * n - 2 * k) for k in range(1, n + 1)]
    size = n + 1

    def entry(i, j):
        k = i + j
        if k <= n:
            return _mono_vector(size, None, floor, k)
        return _mono_vector(size, None, floor, k - n - 1, 1, AffineExponent(-1))

    return _build(CPN, None, floor, basis, entry, 2 * n, n + 1, "Omega*Z", n=n)


def make_even_hirzebruch(mu, floor=None) -> AlgebraPresentation:
    """``Lambda[u, v]/(u^2 = t^-1, v^2 = t^-mu)`` on the basis ``1, u, v, uv``."""
    mu = as_rational(mu)
    if mu <= 0:
        raise InvalidParameterError("mu must be positive")
    floor = _floor_for(mu, floor)
    basis = [BasisClass("1", 4), BasisClass("u", 2, 1), BasisClass("v", 2, 1),
             BasisClass("uv", 0, 2)]
    # basis index -> (power of u, power of v)
    bits = [(0, 0), (1, 0), (0, 1), (1, 1)]

    def entry(i, j):
        a = bits[i][0] + bits[j][0]
        b = bits[i][1] + bits[j][1]
        exponent = AffineExponent(-(a // 2), -(b // 2))
        return _mono_vector(4, mu, floor, bits.index((a % 2, b % 2)), 1, exponent)

    return _build(EVEN, mu, floor, basis, entry, 4, 0, "Z+mu*Z")


def make_odd_hirzebruch(mu, floor=None) -> AlgebraPresentation:
    """One-point blow-up of CP^2 on the basis ``1, u, u3, u0``.

    The algebra is ``Lambda[u]/(u^4 t^(2mu) + u^3 t^mu - t^-1)``.  Basis
    classes are written in powers of ``u`` (``u3 = u^2 t^mu`` and
    ``u0 = u^2 + u^3 t^mu``), multiplied there, reduced and written back.
    ``u1 = u + u3`` is available through :func:`odd_u1_coordinates`.
    """
    mu = as_rational(mu)
    if mu <= 0:
        raise InvalidParameterError("mu must be positive")
    floor = _floor_for(mu, floor)
    basis = [BasisClass("1", 4), BasisClass("u", 2, 1), BasisClass("u3", 2, 1),
             BasisClass("u0", 0, 2)]

    def sc(*pairs):
        return NovikovScalar.from_affine([(c, AffineExponent(a, b)) for c, a, b in pairs],
                                         mu, floor)

    zero = NovikovScalar.zero(mu, floor)
    # coordinates of each basis class in 1, u, u^2, u^3
    to_powers = [
        [sc((1, 0, 0)), zero, zero, zero],
        [zero, sc((1, 0, 0)), zero, zero],
        [zero, zero, sc((1, 0, 1)), zero],
        [zero, zero, sc((1, 0, 0)), sc((1, 0, 1))],
    ]
    # coordinates of u^k in the basis, k = 0..3
    from_powers = [
        [sc((1, 0, 0)), zero, zero, zero],
        [zero, sc((1, 0, 0)), zero, zero],
        [zero, zero, sc((1, 0, -1)), zero],
        [zero, zero, sc((-1, 0, -2)), sc((1, 0, -1))],
    ]
    # u^4 = t^(-2mu-1) - u^3 t^-mu
    u4 = [sc((1, -1, -2)), zero, zero, sc((-1, 0, -1))]

    def entry(i, j):
        prod = [zero] * 7
        for a, x in enumerate(to_powers[i]):
            for b, y in enumerate(to_powers[j]):
                if not x.is_zero() and not y.is_zero():
                    prod[a + b] = prod[a + b] + x * y
        for d in range(6, 3, -1):
            c = prod[d]
            if c.is_zero():
                continue
            prod[d] = zero
            for e, r in enumerate(u4):
                if not r.is_zero():
                    prod[d - 4 + e] = prod[d - 4 + e] + c * r
        out = [zero] * 4
        for d in range(4):
            if prod[d].is_zero():
                continue
            for k, s in enumerate(from_powers[d]):
                if not s.is_zero():
                    out[k] = out[k] + prod[d] * s
        return tuple(out)

    return _build(ODD, mu, floor, basis, entry, 4, 0, "Z+mu*Z")


def odd_u1_coordinates(x: QuantumClass) -> dict:
    """Coordinates of ``x`` in the basis ``u0, u1, u, 1`` where ``u1 = u + u3``."""
    if x.presentation.manifold != ODD:
        raise ParameterMismatchError("u1 only exists for the odd Hirzebruch surface")
    return {"u0": x["u0"], "u1": x["u3"], "u": x["u"] - x["u3"], "1": x["1"]}
