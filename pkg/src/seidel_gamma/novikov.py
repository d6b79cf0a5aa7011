"""Exact arithmetic in the universal Novikov field at a fixed value of mu.

A scalar is a finite generalized Laurent series ``sum c_k t^{e_k}`` with
rational coefficients and rational exponents, truncated at a precision
floor.  Exponents are stored already evaluated at mu, which keeps
cancellation exact when two affine exponents happen to coincide.  Each term
also remembers the affine form ``a + b*mu`` it came from; that tag is
metadata only and degrades to ``MIXED`` when distinct forms collide.
"""
from __future__ import annotations

import heapq
import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from numbers import Rational

from .errors import NotInvertibleError, ParameterMismatchError

__all__ = [
    "MIXED",
    "NEG_INFINITY",
    "AffineExponent",
    "NovikovScalar",
    "as_rational",
    "default_window",
    "exp_eval",
    "scalar_add",
    "scalar_div",
    "scalar_invert",
    "scalar_mul",
    "valuation",
]

MIXED = "mixed"
NEG_INFINITY = float("-inf")

WINDOW_ENV = "SEIDEL_GAMMA_WINDOW"
DEFAULT_WINDOW_CONSTANT = 8


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"a/b"`` strings to a Fraction.

    Floats are rejected: nothing in this package is allowed to be inexact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _norm(c):
    # ints are much cheaper than Fractions and most coefficients stay integral
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def default_window(mu, p: int) -> Fraction:
    """Width W of the precision window for powers up to ``|p|``.

    ``W = C * (1 + max(1, mu)) * (|p| + 4)`` with ``C = 8`` unless the
    ``SEIDEL_GAMMA_WINDOW`` environment variable supplies another constant.
    """
    const = as_rational(os.environ.get(WINDOW_ENV, DEFAULT_WINDOW_CONSTANT))
    if const <= 0:
        raise ValueError(f"{WINDOW_ENV} must be positive")
    m = Fraction(1) if mu is None else max(Fraction(1), as_rational(mu))
    return const * (1 + m) * (abs(p) + 4)


@dataclass(frozen=True, order=False)
class AffineExponent:
    """The exponent ``const_part + mu_coeff * mu`` of the Novikov variable."""

    const_part: Fraction = Fraction(0)
    mu_coeff: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "const_part", as_rational(self.const_part))
        object.__setattr__(self, "mu_coeff", as_rational(self.mu_coeff))

    def at(self, mu) -> Fraction:
        return exp_eval(self, mu)

    def __add__(self, other: AffineExponent) -> AffineExponent:
        if not isinstance(other, AffineExponent):
            return NotImplemented
        return AffineExponent(self.const_part + other.const_part,
                              self.mu_coeff + other.mu_coeff)

    def __neg__(self) -> AffineExponent:
        return AffineExponent(-self.const_part, -self.mu_coeff)

    def __sub__(self, other: AffineExponent) -> AffineExponent:
        return self + (-other)

    def scaled(self, k) -> AffineExponent:
        k = as_rational(k)
        return AffineExponent(k * self.const_part, k * self.mu_coeff)

    def __str__(self):
        a, b = self.const_part, self.mu_coeff
        if b == 0:
            return str(a)
        mu_part = "mu" if b == 1 else "-mu" if b == -1 else f"{b}*mu"
        if a == 0:
            return mu_part
        sign = "-" if a < 0 else "+"
        return f"{mu_part}{sign}{abs(a)}"


def exp_eval(e: AffineExponent, mu) -> Fraction:
    """Evaluate an affine exponent at ``mu``.

    ``mu`` may be None only for exponents without a mu part (the complex
    projective spaces have no mu parameter).
    """
    if mu is None:
        if e.mu_coeff != 0:
            raise ValueError(f"exponent {e} needs a value of mu")
        return e.const_part
    mu = as_rational(mu)
    if mu <= 0:
        raise ValueError("mu must be positive")
    return e.const_part + e.mu_coeff * mu


def _lcm(a: int, b: int) -> int:
    return a if a == b else a * b // gcd(a, b)


def _ceil_scaled(x: Fraction, den: int) -> int:
    # smallest integer k with k / den >= x
    return -((-x.numerator * den) // x.denominator)


def _tag_to_pair(tag: AffineExponent, tden: int):
    return (int(tag.const_part * tden), int(tag.mu_coeff * tden))


def _tag_den(tag: AffineExponent) -> int:
    return _lcm(tag.const_part.denominator, tag.mu_coeff.denominator)


def _rescaled(terms, fk, ft):
    if fk == 1 and ft == 1:
        return terms
    return {k * fk: (c, None if t is None else (t[0] * ft, t[1] * ft))
            for k, (c, t) in terms.items()}


class NovikovScalar:
    """Immutable truncated generalized Laurent series over the rationals.

    ``terms`` maps an evaluated exponent to ``(coefficient, tag)`` where
    ``tag`` is the AffineExponent the term came from or ``MIXED``.  Terms
    below ``floor`` are dropped on construction, as are zero coefficients.
    Equality compares coefficients, floor and mu; tags are ignored.

    Internally exponents are integers over a common denominator and tags
    are integer pairs over a second one, which keeps Fraction arithmetic
    out of the inner loops.
    """

    __slots__ = ("_terms", "_den", "_tden", "floor", "mu")

    def __init__(self, terms=None, floor=None, mu=None):
        if floor is None:
            raise ValueError("a precision floor is required")
        floor = as_rational(floor)
        mu = None if mu is None else as_rational(mu)
        if mu is not None and mu <= 0:
            raise ValueError("mu must be positive")
        staged = []
        den, tden = 1, 1
        for key, (coeff, tag) in (terms or {}).items():
            key = as_rational(key)
            coeff = _norm(as_rational(coeff))
            if tag is not MIXED:
                if not isinstance(tag, AffineExponent):
                    raise TypeError("tag must be an AffineExponent or MIXED")
                if exp_eval(tag, mu) != key:
                    raise ValueError(f"tag {tag} does not evaluate to {key}")
                tden = _lcm(tden, _tag_den(tag))
            if coeff != 0 and key >= floor:
                staged.append((key, coeff, tag))
                den = _lcm(den, key.denominator)
        self._terms = {
            int(key * den): (coeff, None if tag is MIXED else _tag_to_pair(tag, tden))
            for key, coeff, tag in staged}
        self._den = den
        self._tden = tden
        self.floor = floor
        self.mu = mu

    @classmethod
    def _raw(cls, terms, den, tden, floor, mu):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._den = den
        obj._tden = tden
        obj.floor = floor
        obj.mu = mu
        return obj

    def _like(self, terms, den=None, tden=None):
        return NovikovScalar._raw(terms, self._den if den is None else den,
                                  self._tden if tden is None else tden, self.floor, self.mu)

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, mu, floor):
        return cls({}, floor, mu)

    @classmethod
    def monomial(cls, coeff, exponent, mu, floor):
        """``coeff * t^exponent``; ``exponent`` may be an AffineExponent or a rational."""
        if not isinstance(exponent, AffineExponent):
            exponent = AffineExponent(exponent)
        return cls({exp_eval(exponent, mu): (coeff, exponent)}, floor, mu)

    @classmethod
    def one(cls, mu, floor):
        return cls.monomial(1, AffineExponent(), mu, floor)

    @classmethod
    def from_affine(cls, pairs, mu, floor):
        """Build ``sum c * t^e`` from ``(c, AffineExponent)`` pairs, merging ties."""
        out = cls.zero(mu, floor)
        for coeff, exponent in pairs:
            out = out + cls.monomial(coeff, exponent, mu, floor)
        return out

    # accessors ------------------------------------------------------------

    def _public_tag(self, t):
        if t is None:
            return MIXED
        return AffineExponent(Fraction(t[0], self._tden), Fraction(t[1], self._tden))

    @property
    def terms(self):
        """The term map ``{exponent: (coefficient, tag)}`` with Fraction keys."""
        return {Fraction(k, self._den): (Fraction(c), self._public_tag(t))
                for k, (c, t) in self._terms.items()}

    def items(self):
        """Terms as ``(exponent, coefficient, tag)`` in decreasing exponent order."""
        return [(Fraction(k, self._den), Fraction(c), self._public_tag(t))
                for k, (c, t) in sorted(self._terms.items(), reverse=True)]

    def coefficient(self, exponent) -> Fraction:
        e = as_rational(exponent) * self._den
        if e.denominator != 1:
            return Fraction(0)
        entry = self._terms.get(e.numerator)
        return Fraction(0) if entry is None else Fraction(entry[0])

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def valuation(self):
        if not self._terms:
            return NEG_INFINITY
        return Fraction(max(self._terms), self._den)

    def lowest_exponent(self):
        if not self._terms:
            return None
        return Fraction(min(self._terms), self._den)

    def leading_term(self):
        """``(exponent, coefficient, tag)`` of the top term, or None for zero."""
        if not self._terms:
            return None
        k = max(self._terms)
        c, t = self._terms[k]
        return Fraction(k, self._den), Fraction(c), self._public_tag(t)

    # arithmetic -----------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, NovikovScalar):
            raise TypeError("expected a NovikovScalar")
        if self.mu != other.mu or self.floor != other.floor:
            raise ParameterMismatchError(
                f"scalars built for (mu={self.mu}, floor={self.floor}) and "
                f"(mu={other.mu}, floor={other.floor})")

    def _aligned(self, other):
        den = _lcm(self._den, other._den)
        tden = _lcm(self._tden, other._tden)
        a = _rescaled(self._terms, den // self._den, tden // self._tden)
        b = _rescaled(other._terms, den // other._den, tden // other._tden)
        return den, tden, a, b

    def __add__(self, other):
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        self._check(other)
        den, tden, a, b = self._aligned(other)
        if len(b) > len(a):
            a, b = b, a
        out = dict(a)
        for k, (c, t) in b.items():
            prev = out.get(k)
            if prev is None:
                out[k] = (c, t)
                continue
            s = _norm(prev[0] + c)
            if s == 0:
                del out[k]
            else:
                out[k] = (s, prev[1] if prev[1] == t else None)
        return self._like(out, den, tden)

    def __neg__(self):
        return self._like({k: (-c, t) for k, (c, t) in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, NovikovScalar):
            self._check(other)
            return self._convolve(other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def _convolve(self, other):
        if not self._terms or not other._terms:
            return self._like({})
        den, tden, a, b = self._aligned(other)
        if len(a) < len(b):
            a, b = b, a
        lo = _ceil_scaled(self.floor, den)
        out = {}
        get = out.get
        for kb, (cb, tb) in b.items():
            for ka, (ca, ta) in a.items():
                k = ka + kb
                if k < lo:
                    continue
                c = ca * cb
                t = None if ta is None or tb is None else (ta[0] + tb[0], ta[1] + tb[1])
                prev = get(k)
                if prev is None:
                    out[k] = (c, t)
                else:
                    out[k] = (prev[0] + c, prev[1] if prev[1] == t else None)
        out = {k: (_norm(c), t) for k, (c, t) in out.items() if c != 0}
        return self._like(out, den, tden)

    def scale(self, c):
        c = as_rational(c)
        if c == 0:
            return self._like({})
        return self._like({k: (_norm(v * c), t) for k, (v, t) in self._terms.items()})

    def shift(self, exponent):
        """Multiply by the monomial ``t^exponent``."""
        if not isinstance(exponent, AffineExponent):
            exponent = AffineExponent(exponent)
        d = exp_eval(exponent, self.mu)
        den = _lcm(self._den, d.denominator)
        tden = _lcm(self._tden, _tag_den(exponent))
        terms = _rescaled(self._terms, den // self._den, tden // self._tden)
        dk = int(d * den)
        da, db = _tag_to_pair(exponent, tden)
        lo = _ceil_scaled(self.floor, den)
        out = {k + dk: (c, None if t is None else (t[0] + da, t[1] + db))
               for k, (c, t) in terms.items() if k + dk >= lo}
        return self._like(out, den, tden)

    def with_floor(self, floor):
        """Same series against a different floor (terms below it are dropped)."""
        floor = as_rational(floor)
        lo = _ceil_scaled(floor, self._den)
        return NovikovScalar._raw({k: v for k, v in self._terms.items() if k >= lo},
                                  self._den, self._tden, floor, self.mu)

    def invert(self):
        return scalar_invert(self)

    # comparison / display -------------------------------------------------

    def _coeff_map(self):
        return {Fraction(k, self._den): c for k, (c, _) in self._terms.items()}

    def __eq__(self, other):
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        if self.mu != other.mu or self.floor != other.floor:
            return False
        if len(self._terms) != len(other._terms):
            return False
        if self._den == other._den:
            return all(k in other._terms and other._terms[k][0] == c
                       for k, (c, _) in self._terms.items())
        return self._coeff_map() == other._coeff_map()

    def __hash__(self):
        return hash((self.mu, self.floor, frozenset(self._coeff_map().items())))

    def __repr__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*t^({k})" for k, c, _ in self.items())


def scalar_add(x: NovikovScalar, y: NovikovScalar) -> NovikovScalar:
    return x + y


def scalar_mul(x: NovikovScalar, y: NovikovScalar) -> NovikovScalar:
    return x * y


def valuation(x: NovikovScalar):
    """Largest exponent carrying a nonzero coefficient; ``NEG_INFINITY`` for 0."""
    return x.valuation()


def scalar_div(x: NovikovScalar, d: NovikovScalar) -> NovikovScalar:
    """Quotient ``x / d`` down to the floor, by long division from the top.

    Writing ``d = c t^v (1 - r)`` with ``v(r) < 0`` this produces exactly the
    terms of ``x c^-1 t^-v sum_k r^k`` that lie at or above the floor, but the
    cost is proportional to (terms of the quotient) x (terms of d) rather
    than to the number of powers of ``r`` that have to be expanded.
    """
    x._check(d)
    if d.is_zero():
        raise NotInvertibleError("division by the zero scalar")
    den, tden, xt, dt = x._aligned(d)
    lo = _ceil_scaled(x.floor, den)
    lead_k = max(dt)
    lead_c, lead_t = dt[lead_k]
    rest = [(k - lead_k, c, t) for k, (c, t) in dt.items() if k != lead_k]

    rem = dict(xt)
    heap = [-k for k in rem]
    heapq.heapify(heap)
    queued = set(rem)
    quot = {}
    while heap:
        k = -heapq.heappop(heap)
        queued.discard(k)
        entry = rem.pop(k, None)
        if entry is None:
            continue
        qk = k - lead_k
        if qk < lo:
            break
        c, t = entry
        if type(c) is int and type(lead_c) is int and c % lead_c == 0:
            qc = c // lead_c
        else:
            qc = _norm(Fraction(c) / lead_c)
        qt = None if t is None or lead_t is None else (t[0] - lead_t[0], t[1] - lead_t[1])
        quot[qk] = (qc, qt)
        for off, dc, dtag in rest:
            nk = k + off
            if nk - lead_k < lo:
                continue
            sub = -qc * dc
            ntag = None if qt is None or dtag is None else (qt[0] + dtag[0], qt[1] + dtag[1])
            prev = rem.get(nk)
            if prev is None:
                rem[nk] = (sub, ntag)
            else:
                s = _norm(prev[0] + sub)
                if s == 0:
                    del rem[nk]
                    continue
                rem[nk] = (s, prev[1] if prev[1] == ntag else None)
            if nk not in queued:
                queued.add(nk)
                heapq.heappush(heap, -nk)
    return NovikovScalar._raw(quot, den, tden, x.floor, x.mu)


def scalar_invert(x: NovikovScalar) -> NovikovScalar:
    """Inverse of ``x`` to working precision; ``valuation`` of the result is ``-valuation(x)``."""
    if x.is_zero():
        raise NotInvertibleError("the zero scalar is not invertible")
    return scalar_div(NovikovScalar.one(x.mu, x.floor), x)
