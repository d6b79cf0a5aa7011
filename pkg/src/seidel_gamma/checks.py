"""The verification suite: every claimed value recomputed and compared.

Each check group yields :class:`CheckRecord` objects.  The CLI serializes
them and the acceptance tests assert on them, so both see the same list.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    CPN,
    EVEN,
    MU,
    ODD,
    T,
    AlgebraPresentation,
    QuantumClass,
    _solve_inverse,
    degree_check,
    invert,
    make_cpn,
    make_even_hirzebruch,
    make_odd_hirzebruch,
    mul,
    val,
)
from .errors import NotInvertibleError
from .novikov import AffineExponent, as_rational, default_window
from .seidel import (
    HALF,
    VALUATION_THRESHOLDS,
    LoopClass,
    SeidelLadder,
    gamma_closed_form_affine,
    gamma_closed_form_odd,
    lemma_minimum,
    odd_regime,
    valuation_by_residue_odd,
    valuation_closed_form_odd,
    verify_lemma_leading_terms,
)
from .sweep import SweepSample, default_grid, fit_piecewise_linear, sweep_gamma

__all__ = [
    "CHECK_GROUPS",
    "CheckRecord",
    "SuiteOptions",
    "odd_power_oracle",
    "random_element",
    "run_checks",
]

F = Fraction
SMALL_MUS = (F(1, 6), F(1, 4), F(1, 3), F(1, 2))
LARGE_MUS = (F(3, 5), F(3, 4), F(1), F(3, 2), F(2))
EVEN_MUS = (F(3, 2), F(2), F(7, 3))
LEMMA_LARGE_MUS = (F(3, 4), F(2))
# 1/2 is a wall where leading coefficients of different coordinates collide
LEMMA_SMALL_MUS = (F(1, 6), F(1, 4), F(1, 3))
CPN_NS = tuple(range(1, 9))


def _s(x) -> str:
    return str(x)


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    params: dict
    expected: object
    got: object
    passed: bool

    def as_json(self) -> dict:
        return {"check_id": self.check_id, "params": self.params,
                "expected": self.expected, "got": self.got, "pass": self.passed}


def _rec(check_id, params, expected, got, ok=None) -> CheckRecord:
    params = {k: _s(v) for k, v in params.items()}
    if ok is None:
        ok = expected == got
    return CheckRecord(check_id, params, _s(expected), _s(got), bool(ok))


@dataclass
class SuiteOptions:
    """Knobs for :func:`run_checks`.

    ``mus`` restricts every mu-indexed group to the given values (groups
    with no overlap are skipped).  ``window`` fixes the precision window;
    otherwise ``window_scale`` multiplies the default one.
    """

    mus: tuple | None = None
    q_range: tuple | None = None
    window: Fraction | None = None
    window_scale: int = 1
    table_fixture: AlgebraPresentation | None = None
    seed: int = 20240611

    def pick(self, mus):
        if self.mus is None:
            return tuple(mus)
        return tuple(m for m in mus if m in self.mus)

    def floor(self, mu, max_exponent) -> Fraction:
        if self.window is not None:
            return -as_rational(self.window)
        return -self.window_scale * default_window(mu, max_exponent)

    def ladder(self, manifold, mu, max_exponent, n=None) -> SeidelLadder:
        loop = LoopClass(manifold, 1, mu, n)
        return SeidelLadder(loop, max_exponent, self.floor(mu, max_exponent))

    def indices(self, default):
        return range(self.q_range[0], self.q_range[1] + 1) if self.q_range else default


# ---------------------------------------------------------------------------
# check groups


def check_cpn(opt: SuiteOptions):
    for n in CPN_NS:
        ladder = opt.ladder(CPN, None, 50, n)
        for m in range(-50, 51):
            want = 1 if m % (n + 1) else 0
            g = ladder.gamma(m)
            yield _rec("cpn-dichotomy", {"n": n, "m": m}, want, g.value)


def check_even_parity(opt: SuiteOptions):
    for mu in opt.pick(EVEN_MUS):
        ladder = opt.ladder(EVEN, mu, 100)
        for ell in range(1, 101):
            yield _rec("even-parity", {"mu": mu, "l": ell}, ell % 2, ladder.gamma(ell).value)


def check_odd_small(opt: SuiteOptions):
    for mu in opt.pick(SMALL_MUS):
        ladder = opt.ladder(ODD, mu, 100)
        for p in range(7, 101):
            yield _rec("odd-small-closed-form", {"mu": mu, "p": p},
                       gamma_closed_form_odd(mu, p), ladder.gamma(p).value)


def check_odd_large(opt: SuiteOptions):
    for mu in opt.pick(LARGE_MUS):
        ladder = opt.ladder(ODD, mu, 100)
        for p in range(12, 101):
            yield _rec("odd-large-table", {"mu": mu, "p": p},
                       gamma_closed_form_odd(mu, p), ladder.gamma(p).value)


def check_valuations(opt: SuiteOptions):
    for mu in opt.pick(SMALL_MUS + LARGE_MUS):
        ladder = opt.ladder(ODD, mu, 60)
        regime = odd_regime(mu)
        for sign, k in (("-", -1), ("+", 1)):
            for p in range(VALUATION_THRESHOLDS[regime, sign], 61):
                got = val(ladder.u_power(k * p))
                params = {"mu": mu, "p": p, "sign": sign}
                yield _rec("valuation-table", params,
                           valuation_closed_form_odd(mu, p, sign), got)
                if regime != "small":
                    yield _rec("valuation-residue", params,
                               valuation_by_residue_odd(mu, p, sign), got)


def _lemma_records(opt, check_id, kind, mus, default_hi):
    for mu in mus:
        lo = lemma_minimum(mu, kind)
        idx = [i for i in opt.indices(range(lo, default_hi + 1)) if i >= lo]
        if not idx:
            continue
        top = max(idx)
        biggest = 4 * top if mu > HALF else (3 * top + 1 if kind == "negative" else top)
        ladder = opt.ladder(ODD, mu, biggest)
        for i in idx:
            report = verify_lemma_leading_terms(mu, i, kind, ladder)
            for c in report.checks:
                yield _rec(check_id, {"mu": mu, "q": i, "term": c["check"]},
                           c["expected"], c["got"], c["pass"])


def check_lemma_neg(opt: SuiteOptions):
    yield from _lemma_records(opt, "lemma-neg", "negative", opt.pick(LEMMA_LARGE_MUS), 25)
    yield from _lemma_records(opt, "lemma-neg", "negative", opt.pick(LEMMA_SMALL_MUS), 25)


def check_lemma_pos(opt: SuiteOptions):
    yield from _lemma_records(opt, "lemma-pos", "positive", opt.pick(LEMMA_LARGE_MUS), 25)
    yield from _lemma_records(opt, "lemma-pos", "positive", opt.pick(LEMMA_SMALL_MUS), 80)


def check_monotone(opt: SuiteOptions):
    for mu in opt.pick((HALF,)):
        ladder = opt.ladder(ODD, mu, 100)
        for p in range(-100, 101):
            if p:
                yield _rec("monotone-constant", {"mu": mu, "p": p}, 2, ladder.gamma(p).value)


def check_bounded(opt: SuiteOptions):
    for mu in opt.pick((F(3, 4),)):
        ladder = opt.ladder(ODD, mu, 200)
        top = max(ladder.gamma(p).value for p in range(1, 201))
        yield _rec("bounded", {"mu": mu, "p": "1..200"}, 2, top)
    for mu in opt.pick((F(1, 4),)):
        ladder = opt.ladder(ODD, mu, 100)
        ps = list(range(7, 101, 3))  # p = 1 mod 3 from the closed-form threshold on
        values = [ladder.gamma(p).value for p in ps]
        increasing = all(a < b for a, b in zip(values, values[1:]))
        yield _rec("unbounded-increasing", {"mu": mu, "p": "7..100 step 3"},
                   True, increasing)
        early = max(v for p, v in zip(ps, values) if p <= 60)
        yield _rec("unbounded-exceeds-10", {"mu": mu, "p": "<=60"}, True, early > 10)


def check_piecewise(opt: SuiteOptions):
    grid = default_grid()
    if opt.window is None and opt.window_scale == 1:
        samples = sweep_gamma(ODD, 13, grid)
    else:
        samples = []
        for mu in grid:
            g = opt.ladder(ODD, mu, 13).gamma(13)
            samples.append(SweepSample(mu, 13, g.value, g.generic_mu))
    pl = fit_piecewise_linear(samples)
    params = {"p": 13, "grid": "k/60, k=1..180"}
    yield _rec("pl-continuous", params, True, pl.is_continuous())
    yield _rec("pl-breakpoints", params, "1/2, 1", ", ".join(map(str, pl.breakpoints)))
    for i, piece in enumerate(pl.pieces):
        lo = pl.breakpoints[i - 1] if i else F(0)
        hi = pl.breakpoints[i] if i < len(pl.breakpoints) else max(grid)
        want = gamma_closed_form_affine((lo + hi) / 2, 13)
        yield _rec("pl-piece", {"p": 13, "from": lo, "to": hi}, want, piece)


def random_element(pres: AlgebraPresentation, rng: random.Random, terms: int = 3) -> QuantumClass:
    """A random class with small integer coefficients and nonpositive exponents."""
    x = pres.zero()
    for _ in range(terms):
        name = rng.choice(pres.basis).name
        coeff = rng.choice([-3, -2, -1, 1, 2, 3])
        if pres.manifold == CPN:
            e = AffineExponent(-rng.randint(0, 2))
        else:
            e = AffineExponent(-rng.randint(0, 2), -rng.randint(0, 1))
        x = x + pres.element(name, coeff, e)
    return x


def _presentations(opt: SuiteOptions):
    return [make_cpn(3, opt.floor(None, 0)),
            make_even_hirzebruch(F(3, 2), opt.floor(F(3, 2), 0)),
            make_odd_hirzebruch(F(3, 4), opt.floor(F(3, 4), 0))]


def check_axioms(opt: SuiteOptions):
    rng = random.Random(opt.seed)
    for pres in _presentations(opt):
        xs = [random_element(pres, rng) for _ in range(100)]
        one = pres.unit()
        comm = assoc = unit = True
        for i, a in enumerate(xs):
            b, c = xs[(i + 1) % 100], xs[(i + 2) % 100]
            comm &= mul(a, b) == mul(b, a)
            assoc &= mul(mul(a, b), c) == mul(a, mul(b, c))
            unit &= mul(one, a) == a == mul(a, one)
        name = pres.manifold
        yield _rec("axiom-commutative", {"algebra": name, "samples": 100}, True, comm)
        yield _rec("axiom-associative", {"algebra": name, "samples": 100}, True, assoc)
        yield _rec("axiom-unit", {"algebra": name, "samples": 100}, True, unit)


def odd_power_oracle(mu, p: int, floor) -> dict:
    """``u^p`` by plain polynomial reduction in ``u``, for comparison.

    Powers of ``u`` are kept as ``{degree < 4: {exponent: coeff}}`` and
    ``u^4`` is replaced by ``t^(-1-2mu) - u^3 t^(-mu)``.  The result is
    rewritten in the basis ``1, u, u3 = u^2 t^mu, u0 = u^2 + u^3 t^mu`` and
    returned as ``{basis name: {exponent: coeff}}`` restricted to
    exponents at or above ``floor``.
    """
    mu = as_rational(mu)
    poly = {0: {F(0): F(1)}}
    for _ in range(p):
        shifted = {}
        for d, series in poly.items():
            target = shifted.setdefault(d + 1, {})
            for e, c in series.items():
                target[e] = target.get(e, 0) + c
        top = shifted.pop(4, {})
        for e, c in top.items():
            s0 = shifted.setdefault(0, {})
            s0[e - 1 - 2 * mu] = s0.get(e - 1 - 2 * mu, 0) + c
            s3 = shifted.setdefault(3, {})
            s3[e - mu] = s3.get(e - mu, 0) - c
        poly = shifted
    out = {"1": {}, "u": {}, "u3": {}, "u0": {}}

    def put(name, e, c):
        out[name][e] = out[name].get(e, 0) + c

    for d, series in poly.items():
        for e, c in series.items():
            if d == 0:
                put("1", e, c)
            elif d == 1:
                put("u", e, c)
            elif d == 2:  # u^2 = u3 t^-mu
                put("u3", e - mu, c)
            else:  # u^3 = u0 t^-mu - u3 t^-2mu
                put("u0", e - mu, c)
                put("u3", e - 2 * mu, -c)
    return {name: {e: c for e, c in series.items() if c != 0 and e >= floor}
            for name, series in out.items()}


def check_power_oracle(opt: SuiteOptions):
    for mu in opt.pick((F(1, 4), F(3, 4), F(2))):
        ladder = opt.ladder(ODD, mu, 20)
        floor = ladder.presentation.floor
        for p in range(1, 21):
            x = ladder.u_power(p)
            got = {b.name: {e: c for e, (c, _t) in x[b.name].terms.items()}
                   for b in ladder.presentation.basis}
            want = odd_power_oracle(mu, p, floor)
            yield _rec("power-oracle", {"mu": mu, "p": p}, "match",
                       "match" if got == want else "differs")


def check_invert_u(opt: SuiteOptions):
    for mu in opt.pick((F(1, 4), F(1, 2), F(3, 4), F(2))):
        pres = make_odd_hirzebruch(mu, opt.floor(mu, 0))
        u = pres.element("u")
        closed = pres.element("u0", 1, MU + T)
        yield _rec("invert-u", {"mu": mu, "method": "invert"}, closed, invert(u))
        yield _rec("invert-u", {"mu": mu, "method": "linear-solve"}, closed, _solve_inverse(u))


def check_inverse_roundtrip(opt: SuiteOptions):
    rng = random.Random(opt.seed + 1)
    for pres in _presentations(opt):
        done = tried = 0
        ok = True
        while done < 50 and tried < 500:
            tried += 1
            a = random_element(pres, rng)
            try:
                b = invert(a)
            except NotInvertibleError:
                continue
            done += 1
            ok &= mul(a, b) == pres.unit()
        yield _rec("inverse-roundtrip", {"algebra": pres.manifold, "samples": done},
                   True, ok and done == 50)


def check_degrees(opt: SuiteOptions):
    for pres in _presentations(opt):
        res = degree_check(pres)
        yield _rec("degree_check", {"algebra": pres.manifold}, "ok",
                   "ok" if res else f"{len(res.offending)} bad terms")
    if opt.table_fixture is not None:
        res = degree_check(opt.table_fixture)
        got = "ok" if res else "; ".join(
            f"{b['left']}*{b['right']} -> {b['term']}" for b in res.offending)
        yield _rec("degree_check", {"algebra": opt.table_fixture.manifold,
                                    "fixture": opt.table_fixture.label}, "ok", got)


def _pseudo_norm_ladders(opt):
    for n in (1, 2, 3, 4):
        yield f"cpn n={n}", None, opt.ladder(CPN, None, 40, n)
    for mu in opt.pick(EVEN_MUS):
        yield EVEN, mu, opt.ladder(EVEN, mu, 40)
    for mu in opt.pick(SMALL_MUS + LARGE_MUS):
        yield ODD, mu, opt.ladder(ODD, mu, 40)


def check_pseudo_norm(opt: SuiteOptions):
    for family, mu, ladder in _pseudo_norm_ladders(opt):
        g = {p: ladder.gamma(p) for p in range(-40, 41)}
        params = {"family": family, "mu": mu if mu is not None else "-"}
        yield _rec("pn-nonnegative", params, True, all(r.value >= 0 for r in g.values()))
        yield _rec("pn-symmetric", params, True,
                   all(g[p].value == g[-p].value for p in range(1, 41)))
        bad = [(a, b) for a in range(-20, 21) for b in range(-20, 21)
               if g[a + b].value > g[a].value + g[b].value]
        yield _rec("pn-subadditive", params, "none", bad[0] if bad else "none")
        yield _rec("pn-lattice", params, True, all(r.lattice_ok for r in g.values()))


CHECK_GROUPS = {
    "cpn": check_cpn,
    "even-parity": check_even_parity,
    "odd-small": check_odd_small,
    "odd-large": check_odd_large,
    "valuations": check_valuations,
    "lemma-neg": check_lemma_neg,
    "lemma-pos": check_lemma_pos,
    "monotone": check_monotone,
    "bounded": check_bounded,
    "piecewise": check_piecewise,
    "axioms": check_axioms,
    "power-oracle": check_power_oracle,
    "invert-u": check_invert_u,
    "inverse-roundtrip": check_inverse_roundtrip,
    "degree_check": check_degrees,
    "pseudo-norm": check_pseudo_norm,
}


def run_checks(groups=None, options: SuiteOptions | None = None) -> list:
    """Run the named check groups (all by default) and collect the records."""
    options = options or SuiteOptions()
    names = list(CHECK_GROUPS) if groups is None else list(groups)
    unknown = [g for g in names if g not in CHECK_GROUPS]
    if unknown:
        raise KeyError(f"unknown check group(s): {', '.join(unknown)}")
    records = []
    for name in names:
        records.extend(CHECK_GROUPS[name](options))
    return records
