"""Seidel elements of the loop classes and the pseudo-norm Gamma.

``Gamma(h) = val(S(h)) + val(S(h^-1))`` is computed directly in the
quantum homology algebras of :mod:`seidel_gamma.algebra`.  The closed forms
for the odd Hirzebruch surface and the lemma checkers live here as well so
they can be compared against the direct computation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    CPN,
    EVEN,
    ODD,
    AlgebraPresentation,
    QuantumClass,
    invert,
    make_cpn,
    make_even_hirzebruch,
    make_odd_hirzebruch,
    mul,
    odd_u1_coordinates,
    val,
)
from .errors import InvalidParameterError, OutOfRangeError, UnsupportedRegimeError
from .novikov import (
    MIXED,
    AffineExponent,
    NovikovScalar,
    as_rational,
    default_window,
    scalar_div,
)

__all__ = [
    "GammaResult",
    "LoopClass",
    "SeidelLadder",
    "epsilon_even",
    "epsilon_odd",
    "gamma",
    "gamma_circle_action",
    "gamma_closed_form_odd",
    "gamma_many",
    "seidel_element",
    "valuation_by_residue_odd",
    "valuation_closed_form_odd",
    "verify_lemma_leading_terms",
]

FAMILIES = (CPN, EVEN, ODD)
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class LoopClass:
    """The class ``g^exponent`` of the distinguished generator ``g`` of pi_1(Ham).

    ``g`` is ``h_n`` (order n+1) for CP^n and the infinite-order circle
    action Lambda for both Hirzebruch families.
    """

    manifold: str
    exponent: int
    mu: Fraction | None = None
    n: int | None = None

    def __post_init__(self):
        if self.manifold not in FAMILIES:
            raise InvalidParameterError(f"unknown manifold {self.manifold!r}")
        if isinstance(self.exponent, bool) or not isinstance(self.exponent, int):
            raise InvalidParameterError("the exponent must be an integer")
        if self.manifold == CPN:
            if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
                raise InvalidParameterError("CP^n needs an integer n >= 1")
            if self.mu is not None:
                raise InvalidParameterError("CP^n has no mu parameter")
        else:
            if self.mu is None:
                raise InvalidParameterError(f"{self.manifold} needs mu")
            object.__setattr__(self, "mu", as_rational(self.mu))
            if self.mu <= 0:
                raise InvalidParameterError("mu must be positive")

    @property
    def generator(self) -> str:
        return {CPN: "h_n", EVEN: "Lambda_even", ODD: "Lambda_odd"}[self.manifold]

    def inverse(self) -> LoopClass:
        return LoopClass(self.manifold, -self.exponent, self.mu, self.n)

    def with_exponent(self, p: int) -> LoopClass:
        return LoopClass(self.manifold, p, self.mu, self.n)


@dataclass(frozen=True)
class GammaResult:
    value: Fraction
    affine_form: object  # AffineExponent or MIXED
    lattice_ok: bool
    generic_mu: bool
    window: Fraction
    exponent: int = 0

    def __str__(self):
        form = self.affine_form if self.affine_form is MIXED else f"{self.affine_form}"
        return f"{self.value} ({form})"


def epsilon_even(mu) -> Fraction:
    return 1 / (6 * as_rational(mu))


def epsilon_odd(mu) -> Fraction:
    mu = as_rational(mu)
    return (3 * mu * mu + 3 * mu + 1) / (3 * (1 + 2 * mu))


def _check_regime(c: LoopClass):
    if c.manifold == EVEN and c.mu <= 1:
        raise UnsupportedRegimeError(
            f"the infinite-order loop of S^2 x S^2 exists only for mu > 1 (got mu={c.mu})")


def _presentation(c: LoopClass, floor) -> AlgebraPresentation:
    if c.manifold == CPN:
        return make_cpn(c.n, floor)
    if c.manifold == EVEN:
        return make_even_hirzebruch(c.mu, floor)
    return make_odd_hirzebruch(c.mu, floor)


class SeidelLadder:
    """Seidel elements ``S(g^k)`` for one generator, built one step at a time.

    Successive powers are cached so that a batch over ``|p| <= P`` costs
    ``P`` multiplications per direction.  All elements share the floor
    chosen at construction (``-default_window(mu, P)`` by default).
    """

    def __init__(self, loop: LoopClass, max_exponent: int = 0, floor=None):
        _check_regime(loop)
        self.loop = loop
        self.window = (default_window(loop.mu, max_exponent) if floor is None
                       else -as_rational(floor))
        self.presentation = _presentation(loop, -self.window)
        pres = self.presentation
        self._up = [pres.unit()]
        self._down = [pres.unit()]
        self._step_up, self._step_down = self._generators()

    def _generators(self):
        pres, c = self.presentation, self.loop
        if c.manifold == CPN:
            beta = Fraction(1, c.n + 1)
            up = pres.element("A", 1, AffineExponent(beta))
            down = pres.element(pres.basis[-1].name, 1, AffineExponent(1 - beta))
            return up, down
        if c.manifold == ODD:
            eps = epsilon_odd(c.mu)
            # S(Lambda) = u^-1 t^-eps = u0 t^(mu + 1 - eps), and its inverse u t^eps
            up = pres.element("u0", 1, AffineExponent(1 - eps, 1))
            down = pres.element("u", 1, AffineExponent(eps))
            return up, down
        eps = epsilon_even(c.mu)
        up = (pres.element("u") + pres.element("v")).shift(AffineExponent(HALF - eps))
        # (u - v) t^(1/2 + eps), still to be divided by 1 - t^(1 - mu)
        down = (pres.element("u") - pres.element("v")).shift(AffineExponent(HALF + eps))
        return up, down

    def even_denominator(self) -> NovikovScalar:
        pres = self.presentation
        return pres.scalar(1) - pres.scalar(1, AffineExponent(1, -1))

    def _next_down(self, x: QuantumClass) -> QuantumClass:
        y = mul(x, self._step_down)
        if self.loop.manifold != EVEN:
            return y
        d = self.even_denominator()
        return QuantumClass(tuple(scalar_div(s, d) for s in y.coords), y.presentation)

    def element(self, k: int) -> QuantumClass:
        """``S(g^k)``."""
        if k >= 0:
            while len(self._up) <= k:
                self._up.append(mul(self._up[-1], self._step_up))
            return self._up[k]
        while len(self._down) <= -k:
            self._down.append(self._next_down(self._down[-1]))
        return self._down[-k]

    def u_power(self, k: int) -> QuantumClass:
        """``u^k`` in the odd presentation, undoing the eps shift of S."""
        if self.loop.manifold != ODD:
            raise InvalidParameterError("u only exists for the odd Hirzebruch surface")
        return self.element(-k).shift(AffineExponent(-k * epsilon_odd(self.loop.mu)))

    def gamma(self, k: int) -> GammaResult:
        return _gamma_from(self.element(k), self.element(-k), self.loop, self.window, k)


def seidel_element(c: LoopClass, floor=None) -> QuantumClass:
    """The Seidel element ``S(c)`` in the presentation of ``c.manifold``."""
    return SeidelLadder(c, c.exponent, floor).element(c.exponent)


def even_inverse_closed_form(mu, floor=None) -> QuantumClass:
    """``S(Lambda)^-1 = (u - v) t^(1/2 + eps) / (1 - t^(1 - mu))`` for S^2 x S^2."""
    ladder = SeidelLadder(LoopClass(EVEN, -1, mu), 1, floor)
    return ladder.element(-1)


def _lattice_ok(value, form, loop: LoopClass) -> bool:
    if loop.manifold == CPN:
        return value.denominator == 1
    if form is not MIXED and (form.const_part.denominator != 1
                              or form.mu_coeff.denominator != 1):
        return False
    # Z + mu Z = (1/den(mu)) Z for rational mu
    return (value * loop.mu.denominator).denominator == 1


def _gamma_from(s, s_inv, loop, window, k) -> GammaResult:
    value = val(s) + val(s_inv)
    t1, t2 = s.leading_tag(), s_inv.leading_tag()
    form = MIXED if MIXED in (t1, t2) else t1 + t2
    value = Fraction(value)
    return GammaResult(value, form, _lattice_ok(value, form, loop), form is not MIXED,
                       window, k)


def gamma(c: LoopClass, floor=None) -> GammaResult:
    """``Gamma(c) = val(S(c)) + val(S(c^-1))``."""
    return SeidelLadder(c, c.exponent, floor).gamma(c.exponent)


def gamma_many(loop: LoopClass, exponents, floor=None) -> list:
    """Gamma for several exponents of the same generator, sharing one ladder."""
    exponents = list(exponents)
    if not exponents:
        return []
    ladder = SeidelLadder(loop, max(abs(p) for p in exponents), floor)
    return [ladder.gamma(p) for p in exponents]


# ---------------------------------------------------------------------------
# closed forms for the odd Hirzebruch surface


def gamma_closed_form_odd(mu, p: int) -> Fraction:
    """Gamma(Lambda^p) for the blow-up of CP^2, valid for p >= 7 (mu <= 1/2) or p >= 12."""
    mu = as_rational(mu)
    if mu <= 0:
        raise InvalidParameterError("mu must be positive")
    if mu <= HALF:
        if p < 7:
            raise OutOfRangeError("the small-mu closed form holds for p >= 7")
        f = (p - 1) // 3
        return -2 * (f - 1) * mu + (f + 1)
    if p < 12:
        raise OutOfRangeError("the large-mu closed form holds for p >= 12")
    r = p % 4
    if mu <= 1:
        return Fraction(3) - 2 * mu if r == 2 else Fraction(2)
    return {0: Fraction(2), 1: mu + 1, 2: Fraction(1), 3: mu + 1}[r]


def gamma_closed_form_affine(mu, p: int) -> AffineExponent:
    """The closed form above as ``a + b mu`` on the regime containing ``mu``."""
    mu = as_rational(mu)
    if mu <= HALF:
        if p < 7:
            raise OutOfRangeError("the small-mu closed form holds for p >= 7")
        f = (p - 1) // 3
        return AffineExponent(f + 1, -2 * (f - 1))
    if p < 12:
        raise OutOfRangeError("the large-mu closed form holds for p >= 12")
    r = p % 4
    if mu <= 1:
        return AffineExponent(3, -2) if r == 2 else AffineExponent(2, 0)
    return {0: AffineExponent(2), 1: AffineExponent(1, 1), 2: AffineExponent(1),
            3: AffineExponent(1, 1)}[r]


# smallest p for which each valuation formula is claimed
VALUATION_THRESHOLDS = {
    ("small", "-"): 10,   # u^(-3q-1), q >= 3, and the two following powers
    ("small", "+"): 5,
    ("mid", "-"): 12,     # u^(-4q), q >= 3
    ("mid", "+"): 8,      # u^(4q), q >= 2
    # for mu > 1 both valuation formulas already hold from p = 1 on
    ("large", "-"): 1,
    ("large", "+"): 1,
}


def odd_regime(mu) -> str:
    mu = as_rational(mu)
    if mu <= 0:
        raise InvalidParameterError("mu must be positive")
    return "small" if mu <= HALF else "mid" if mu <= 1 else "large"


def _valuation_affine(mu, p, sign) -> AffineExponent:
    if sign not in ("+", "-"):
        raise InvalidParameterError("sign must be '+' or '-'")
    regime = odd_regime(mu)
    if p < VALUATION_THRESHOLDS[regime, sign]:
        raise OutOfRangeError(
            f"valuation formula for {regime} mu, sign {sign}, holds for p >= "
            f"{VALUATION_THRESHOLDS[regime, sign]}")
    if regime == "small":
        if sign == "-":
            f = (p - 1) // 3
            return AffineExponent(f + 1, p - 2 * f)
        return AffineExponent(0, -(p - 2))
    if regime == "mid":
        if sign == "-":
            f = (p + 2) // 4
            return AffineExponent(f + 1, p - 2 * f)
        f = (p + 1) // 4
        return AffineExponent(-(f - 1), -(p - 2 * f))
    if sign == "-":
        return AffineExponent(p // 4 + 1, (p + 1) // 2)
    return AffineExponent(-((p - 1) // 4), -(p // 2))


def valuation_closed_form_odd(mu, p: int, sign: str) -> Fraction:
    """Tabulated ``val(u^-p)`` (sign ``-``) or ``val(u^p)`` (sign ``+``)."""
    return _valuation_affine(mu, p, sign).at(mu)


def valuation_by_residue_odd(mu, p: int, sign: str) -> Fraction:
    """The same valuations read off by the residue of p mod 4 (mu > 1/2 only)."""
    mu = as_rational(mu)
    regime = odd_regime(mu)
    if regime == "small":
        raise OutOfRangeError("residue tables are stated for mu > 1/2")
    if p < VALUATION_THRESHOLDS[regime, sign]:
        raise OutOfRangeError(f"residue table holds for p >= {VALUATION_THRESHOLDS[regime, sign]}")
    q, r = divmod(p, 4)
    mid = regime == "mid"
    if sign == "-":
        table = {
            0: (2 * q, q + 1),
            1: (2 * q + 1, q + 1),
            2: (2 * q, q + 2) if mid else (2 * q + 1, q + 1),
            3: (2 * q + 1, q + 2) if mid else (2 * (q + 1), q + 1),
        }
        b, a = table[r]
        return a + b * mu
    table = {
        0: (2 * q, q - 1),
        1: (2 * q + 1, q - 1) if mid else (2 * q, q),
        2: (2 * (q + 1), q - 1) if mid else (2 * q + 1, q),
        3: (2 * q + 1, q),
    }
    b, a = table[r]
    return -(a + b * mu)


# ---------------------------------------------------------------------------
# lemma checkers


@dataclass
class LemmaReport:
    lemma: str
    mu: Fraction
    index: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def add(self, name, expected, got, ok):
        self.checks.append({"check": name, "expected": expected, "got": got, "pass": bool(ok)})


LEMMAS = ("negative", "positive")


def _lemma_coordinates(x: QuantumClass, negative: bool) -> dict:
    if negative:
        return odd_u1_coordinates(x)
    return {"u0": x["u0"], "u": x["u"], "u3": x["u3"], "1": x["1"]}


def _expected_leading(mu, index, negative):
    """``{coordinate: (exponent, sign, coefficient or None)}`` as the lemmas state them."""
    q = index
    if mu > HALF:
        if negative:
            return {
                "u0": (AffineExponent(q + 1, 2 * q), 1, None),
                "u1": (AffineExponent(q + 1, 2 * q - 1), 1, None),
                "u": (AffineExponent(q + 1, 2 * q - 1), 1, None),
                "1": (AffineExponent(q, 2 * q), 1, None),
            }
        return {
            "u0": (AffineExponent(-(q - 1), -2 * q), -1, None),
            "u": (AffineExponent(-(q - 1), -(2 * q + 1)), -1, None),
            "u3": (AffineExponent(-(q - 1), -(2 * q + 1)), 1, None),
            "1": (AffineExponent(-q, -2 * q), 1, None),
        }
    if negative:
        return {
            "u0": (AffineExponent(q + 1, q + 1), 1, Fraction(1)),
            "u1": (AffineExponent(q, q + 2), 1, Fraction((q - 1) * (q - 2), 2)),
            "u": (AffineExponent(q, q + 2), 1, Fraction(q - 1)),
            "1": (AffineExponent(q, q + 1), 1, Fraction(q)),
        }
    p = index
    s = 1 if p % 2 else -1  # (-1)^(p+1)
    return {
        "u0": (AffineExponent(0, -(p - 2)), s, Fraction(1)),
        "u": (AffineExponent(-1, -(p - 3)), s, Fraction(1)),
        "u3": (AffineExponent(0, -(p - 1)), -s, Fraction(1)),
        "1": (AffineExponent(-1, -(p - 2)), -s, Fraction(1)),
    }


def lemma_power(mu, index: int, kind: str) -> int:
    """The power of u a lemma talks about (``-4q``, ``4q``, ``-3q-1`` or ``p``)."""
    mu = as_rational(mu)
    if kind not in LEMMAS:
        raise InvalidParameterError(f"kind must be one of {LEMMAS}")
    if mu > HALF:
        return -4 * index if kind == "negative" else 4 * index
    return -3 * index - 1 if kind == "negative" else index


def lemma_minimum(mu, kind: str) -> int:
    mu = as_rational(mu)
    if mu > HALF:
        return 3 if kind == "negative" else 2
    return 3 if kind == "negative" else 5


def verify_lemma_leading_terms(mu, index: int, kind: str = "negative",
                               ladder: SeidelLadder | None = None) -> LemmaReport:
    """Compare the leading term of each coordinate of a power of u with the lemma.

    ``kind="negative"`` checks ``u^-4q`` (mu > 1/2) or ``u^-3q-1`` (mu <= 1/2)
    in the basis ``u0, u1, u, 1``; ``kind="positive"`` checks ``u^4q`` or
    ``u^p`` in the basis ``u0, u, u3, 1``.  For mu > 1/2 the leading
    coefficients must be positive numbers (up to the stated sign) that obey
    the recursion from ``index - 1`` to ``index``; below 1/2 the printed
    coefficients are compared exactly.
    """
    mu = as_rational(mu)
    negative = kind == "negative"
    lo = lemma_minimum(mu, kind)
    if index < lo:
        raise OutOfRangeError(f"the {kind} lemma starts at {lo}")
    k = lemma_power(mu, index, kind)
    if ladder is None:
        ladder = SeidelLadder(LoopClass(ODD, 1, mu), abs(k))
    name = f"{kind}-{'large' if mu > HALF else 'small'}-mu"
    report = LemmaReport(name, mu, index)
    coords = _lemma_coordinates(ladder.u_power(k), negative)
    leading = {}
    for coord, (exponent, sign, coeff) in _expected_leading(mu, index, negative).items():
        lt = coords[coord].leading_term()
        want_e = exponent.at(mu)
        if lt is None:
            report.add(f"{coord}:exponent", str(want_e), "-inf", False)
            continue
        got_e, got_c, _ = lt
        leading[coord] = got_c
        report.add(f"{coord}:exponent", str(want_e), str(got_e), got_e == want_e)
        report.add(f"{coord}:sign", sign, 1 if got_c > 0 else -1, (got_c > 0) == (sign > 0))
        if coeff is not None:
            report.add(f"{coord}:coefficient", str(sign * coeff), str(got_c), got_c == sign * coeff)

    if mu > HALF and index > lo and len(leading) == 4:
        prev = _lemma_coordinates(ladder.u_power(lemma_power(mu, index - 1, kind)), negative)
        a = {c: abs(s.leading_term()[1]) for c, s in prev.items() if not s.is_zero()}
        if negative:
            want = {"u0": a["u0"] + a["1"], "u1": a["u0"] + a["u1"],
                    "u": a["u1"] + a["u"], "1": a["1"]}
        else:
            want = {"u0": a["u0"] + a["1"], "u": a["u"] + a["u3"],
                    "u3": a["u0"] + a["u3"] + a["1"], "1": a["1"]}
        for coord, w in want.items():
            got = abs(leading[coord])
            report.add(f"{coord}:recursion", str(w), str(got), got == w)
    return report


def gamma_circle_action(k_max, k_min) -> Fraction:
    """Gamma of a circle action with semifree extremal fixed components."""
    k_max, k_min = as_rational(k_max), as_rational(k_min)
    if k_max < k_min:
        raise InvalidParameterError("k_max must be at least k_min")
    return k_max - k_min
