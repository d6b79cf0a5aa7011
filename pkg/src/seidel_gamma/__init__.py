"""Exact computation of the spectral pseudo-norm Gamma of Hamiltonian loops.

``Gamma(h) = val(S(h)) + val(S(h^-1))`` is evaluated from Seidel elements in
the quantum homology of CP^n and of the two Hirzebruch surfaces, using exact
rational arithmetic over a truncated Novikov field.
"""
from .algebra import (
    CPN,
    EVEN,
    ODD,
    AlgebraPresentation,
    BasisClass,
    DegreeCheck,
    QuantumClass,
    degree_check,
    invert,
    make_cpn,
    make_even_hirzebruch,
    make_odd_hirzebruch,
    mul,
    odd_u1_coordinates,
    power,
    val,
)
from .errors import (
    InsufficientDataError,
    InvalidParameterError,
    NonPiecewiseLinearError,
    NotInvertibleError,
    OutOfRangeError,
    ParameterMismatchError,
    SeidelGammaError,
    UnsupportedRegimeError,
)
from .novikov import (
    MIXED,
    NEG_INFINITY,
    AffineExponent,
    NovikovScalar,
    as_rational,
    default_window,
    scalar_add,
    scalar_div,
    scalar_invert,
    scalar_mul,
    valuation,
)
from .seidel import (
    GammaResult,
    LemmaReport,
    LoopClass,
    SeidelLadder,
    epsilon_even,
    epsilon_odd,
    even_inverse_closed_form,
    gamma,
    gamma_circle_action,
    gamma_closed_form_affine,
    gamma_closed_form_odd,
    gamma_many,
    odd_regime,
    seidel_element,
    valuation_by_residue_odd,
    valuation_closed_form_odd,
    verify_lemma_leading_terms,
)
from .sweep import PiecewiseLinear, SweepSample, default_grid, fit_piecewise_linear, sweep_gamma

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
