from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from seidel_gamma.algebra import CPN, EVEN, ODD, MU, T, invert, mul, val
from seidel_gamma.errors import InvalidParameterError, OutOfRangeError, UnsupportedRegimeError
from seidel_gamma.novikov import MIXED, AffineExponent
from seidel_gamma.seidel import (
    LoopClass,
    SeidelLadder,
    epsilon_even,
    epsilon_odd,
    gamma,
    gamma_circle_action,
    gamma_closed_form_affine,
    gamma_closed_form_odd,
    gamma_many,
    lemma_minimum,
    seidel_element,
    valuation_by_residue_odd,
    valuation_closed_form_odd,
    verify_lemma_leading_terms,
)

A = AffineExponent


# --- loop classes -------------------------------------------------------------

def test_loop_class_validation():
    with pytest.raises(InvalidParameterError):
        LoopClass("torus", 1, F(1))
    with pytest.raises(InvalidParameterError):
        LoopClass(CPN, 1)
    with pytest.raises(InvalidParameterError):
        LoopClass(ODD, 1)
    with pytest.raises(InvalidParameterError):
        LoopClass(ODD, 1, F(-1))
    c = LoopClass(ODD, 3, "3/4")
    assert c.mu == F(3, 4)
    assert c.inverse().exponent == -3


def test_epsilons():
    assert epsilon_even(2) == F(1, 12)
    assert epsilon_odd(F(1, 2)) == F(3 * F(1, 4) + F(3, 2) + 1, 6)


# --- Seidel elements ------------------------------------------------------------

def test_seidel_cpn_full_turn_is_unit():
    s = seidel_element(LoopClass(CPN, 3, n=2))
    assert s == s.presentation.unit()


def test_seidel_cpn_monomial():
    s = seidel_element(LoopClass(CPN, 2, n=3))
    assert s == s.presentation.element("A^2", 1, A(F(2, 4)))


def test_seidel_even_generator():
    s = seidel_element(LoopClass(EVEN, 1, F(2)))
    p = s.presentation
    assert s == (p.element("u") + p.element("v")).shift(A(F(1, 2) - F(1, 12)))


def test_seidel_odd_generator():
    for mu in (F(1, 3), F(3, 4), F(2)):
        s = seidel_element(LoopClass(ODD, 1, mu))
        eps = epsilon_odd(mu)
        assert s == s.presentation.element("u0", 1, MU + T - A(eps))
        # S(Lambda) * S(Lambda^-1) = 1
        assert mul(s, seidel_element(LoopClass(ODD, -1, mu))) == s.presentation.unit()


def test_even_needs_mu_above_one():
    for mu in (F(1, 2), F(1)):
        with pytest.raises(UnsupportedRegimeError):
            gamma(LoopClass(EVEN, 1, mu))


def test_even_ladder_inverse_matches_solver():
    ladder = SeidelLadder(LoopClass(EVEN, 1, F(7, 3)), 3)
    for k in (1, 2, 3):
        assert ladder.element(-k) == invert(ladder.element(k))


# --- gamma ----------------------------------------------------------------------

def test_gamma_trivial_class():
    for c in (LoopClass(CPN, 0, n=2), LoopClass(ODD, 0, F(1, 3)), LoopClass(EVEN, 0, F(2))):
        assert gamma(c).value == 0


def test_gamma_even_odd_powers():
    assert gamma(LoopClass(EVEN, 7, F(2))).value == 1


def even_gamma_oracle(mu, ell):
    """Gamma(Lambda^ell) on S^2 x S^2 by sympy, from the binomial expansions.

    ``S^ell = (u+v)^ell t^(ell(1/2-eps))`` and ``S^-ell = (u-v)^ell
    t^(ell(1/2+eps)) / (1-t^(1-mu))^ell``; the last factor has valuation 0.
    """
    u, v, t_, m_ = sympy.symbols("u v T M")
    rels = [u**2 - 1 / t_, v**2 - 1 / m_]
    eps = epsilon_even(mu)

    def top(expr):
        r = sympy.reduced(sympy.expand(expr), rels, u, v)[1]
        best = None
        for mon in (1, u, v, u * v):
            c = sympy.expand(r.coeff(u, sympy.degree(mon, u)).coeff(v, sympy.degree(mon, v)))
            c = c.subs({u: 0, v: 0}) if mon == 1 else c
            for term in sympy.Add.make_args(c):
                if term == 0:
                    continue
                pw = term.as_coeff_Mul()[1].as_powers_dict()
                e = F(int(pw.get(t_, 0))) + mu * int(pw.get(m_, 0))
                best = e if best is None else max(best, e)
        return best

    plus = top((u + v) ** ell) + ell * (F(1, 2) - eps)
    minus = top((u - v) ** ell) + ell * (F(1, 2) + eps)
    return plus + minus


@pytest.mark.parametrize("ell", [1, 2, 3, 4, 8])
def test_gamma_even_matches_sympy_oracle(ell):
    mu = F(2)
    assert gamma(LoopClass(EVEN, ell, mu)).value == even_gamma_oracle(mu, ell)


def test_gamma_even_power_two_is_two():
    # the uv term of (u+v)^2 keeps valuation 1 - 2eps on each side
    assert gamma(LoopClass(EVEN, 2, F(2))).value == 2
    assert gamma(LoopClass(EVEN, 8, F(2))).value == 2


def test_gamma_monotone_blowup_p5():
    assert gamma(LoopClass(ODD, 5, F(1, 2))).value == 2


def test_gamma_odd_first_power():
    # val(u^-1) + val(u) = (mu + 1) + 0, straight from u^-1 = u0 t^(mu+1)
    for mu in (F(1, 3), F(1, 2), F(3, 4), F(2)):
        r = gamma(LoopClass(ODD, 1, mu))
        assert r.value == mu + 1
        assert r.affine_form == A(1, 1)


def test_gamma_cpn_omega():
    r = gamma(LoopClass(CPN, 5, n=4))
    assert r.value == 0
    r = gamma(LoopClass(CPN, 3, n=4))
    assert r.value == 1 and r.lattice_ok


def test_gamma_many_matches_single():
    loop = LoopClass(ODD, 1, F(3, 4))
    batch = gamma_many(loop, range(-6, 7))
    assert [r.value for r in batch] == [gamma(loop.with_exponent(p)).value for p in range(-6, 7)]
    assert gamma_many(loop, []) == []


def test_generic_flag_at_walls():
    assert not gamma(LoopClass(ODD, 9, F(1, 2))).generic_mu
    assert gamma(LoopClass(ODD, 9, F(1, 3))).generic_mu
    assert gamma(LoopClass(ODD, 9, F(1, 2))).affine_form is MIXED


def test_wall_values_agree_with_both_neighbours():
    # continuity at 1/2 and 1: direct value equals every adjacent affine piece
    for p in range(12, 40):
        for wall, left, right in ((F(1, 2), F(1, 3), F(3, 4)), (F(1), F(3, 4), F(2))):
            direct = gamma(LoopClass(ODD, p, wall)).value
            assert gamma_closed_form_affine(left, p).at(wall) == direct
            assert gamma_closed_form_affine(right, p).at(wall) == direct


# --- closed forms ------------------------------------------------------------------

def test_closed_form_examples():
    assert gamma_closed_form_odd(F(1, 3), 7) == F(7, 3)
    assert gamma_closed_form_odd(F(2), 13) == 3
    assert gamma_closed_form_odd(F(3, 4), 14) == F(3, 2)


def test_closed_form_refuses_small_p():
    with pytest.raises(OutOfRangeError):
        gamma_closed_form_odd(F(1, 3), 6)
    with pytest.raises(OutOfRangeError):
        gamma_closed_form_odd(F(3, 4), 11)


def test_valuation_closed_form_examples():
    assert valuation_closed_form_odd(F(2), 5, "-") == 8
    assert valuation_closed_form_odd(F(3, 4), 12, "-") == F(17, 2)
    assert valuation_closed_form_odd(F(1, 3), 5, "+") == -1
    assert valuation_by_residue_odd(F(3, 4), 12, "-") == F(17, 2)
    with pytest.raises(OutOfRangeError):
        valuation_closed_form_odd(F(3, 4), 4, "-")


@pytest.mark.parametrize("mu", [F(1, 6), F(1, 3), F(3, 5), F(3, 2)])
def test_direct_gamma_matches_closed_form(mu):
    start = 7 if mu <= F(1, 2) else 12
    ladder = SeidelLadder(LoopClass(ODD, 1, mu), 40)
    for p in range(start, 41):
        assert ladder.gamma(p).value == gamma_closed_form_odd(mu, p)


def test_small_p_values_are_nonzero():
    # no closed form below the thresholds, but Gamma never vanishes there
    for mu in (F(1, 4), F(1, 2), F(3, 4), F(2)):
        ladder = SeidelLadder(LoopClass(ODD, 1, mu), 12)
        assert all(ladder.gamma(p).value > 0 for p in range(1, 12))


# --- lemma checkers -------------------------------------------------------------------

def test_lemma_negative_base_case():
    rep = verify_lemma_leading_terms(F(3, 4), 3, "negative")
    assert rep.passed
    exps = {c["check"]: c["got"] for c in rep.checks if c["check"].endswith("exponent")}
    mu = F(3, 4)
    assert exps == {"u0:exponent": str(6 * mu + 4), "u1:exponent": str(5 * mu + 4),
                    "u:exponent": str(5 * mu + 4), "1:exponent": str(6 * mu + 3)}


def test_lemma_positive_base_case():
    assert verify_lemma_leading_terms(F(3, 4), 2, "positive").passed


def test_lemma_small_mu_coefficient():
    rep = verify_lemma_leading_terms(F(1, 3), 4, "negative")
    assert rep.passed
    coeff = [c for c in rep.checks if c["check"] == "u1:coefficient"][0]
    assert coeff["got"] == "3"


def test_lemma_refuses_small_index():
    with pytest.raises(OutOfRangeError):
        verify_lemma_leading_terms(F(3, 4), lemma_minimum(F(3, 4), "negative") - 1)


def test_lemma_at_wall_reports_coefficient_ties():
    # at mu = 1/2 coordinates collide; exponents and signs still agree
    rep = verify_lemma_leading_terms(F(1, 2), 4, "negative")
    assert all(c["pass"] for c in rep.checks if not c["check"].endswith("coefficient"))


# --- circle actions -------------------------------------------------------------------

def test_gamma_circle_action():
    assert gamma_circle_action(F(1, 2), F(-1, 2)) == 1
    assert gamma_circle_action(0, 0) == 0
    with pytest.raises(InvalidParameterError):
        gamma_circle_action(0, 1)


def test_gamma_odd_generator_equals_valuations():
    mu = F(3, 4)
    ladder = SeidelLadder(LoopClass(ODD, 1, mu), 1)
    both = val(ladder.u_power(-1)) + val(ladder.u_power(1))
    assert gamma(LoopClass(ODD, 1, mu)).value == both


# --- pseudo-norm properties --------------------------------------------------------------

LADDERS = {
    ("cpn", 3): SeidelLadder(LoopClass(CPN, 1, n=3), 24),
    ("even", F(3, 2)): SeidelLadder(LoopClass(EVEN, 1, F(3, 2)), 24),
    ("odd", F(1, 4)): SeidelLadder(LoopClass(ODD, 1, F(1, 4)), 24),
    ("odd", F(3, 4)): SeidelLadder(LoopClass(ODD, 1, F(3, 4)), 24),
}


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(sorted(LADDERS, key=str)), st.integers(-12, 12), st.integers(-12, 12))
def test_pseudo_norm_properties(key, a, b):
    ladder = LADDERS[key]
    ga, gb, gab = ladder.gamma(a), ladder.gamma(b), ladder.gamma(a + b)
    assert ga.value >= 0
    assert ga.value == ladder.gamma(-a).value
    assert gab.value <= ga.value + gb.value
    assert ga.lattice_ok
