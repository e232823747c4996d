"""Resonances of the cubic anharmonic oscillator.

Complex-scaled diagonalization, Borel-Pade resummation, strong-coupling
fits and wave-packet autocorrelations.  Exact series come back as
fractions.Fraction.
"""

from fractions import Fraction

from . import _core
from ._core import (
    BasisOverflowError,
    ConvergenceError,
    CubresError,
    DomainError,
    EigenConvergenceError,
    MatchingAmbiguityError,
    NumericalError,
    autocorrelation,
    borel_pade,
    cn_autocorrelation,
    default_ladder,
    default_theta,
    instanton_width,
    leading_spectrum,
    pt_energy,
    resonances,
    resummed_energy,
    strong_coupling_table,
    theta_stability,
)

__version__ = "0.1.0"


def _frac(pair):
    return Fraction(int(pair[0]), int(pair[1]))


def b_series(k_max):
    """b_k(E) for k = 0 .. k_max; entry [k][i] multiplies E**i."""
    return [[_frac(c) for c in row] for row in _core.b_series(k_max)]


def rspt_coefficients(level, k_max):
    """E_{N,K} for K = 0 .. k_max."""
    return [_frac(c) for c in _core.rspt_coefficients(level, k_max)]


def instanton_action():
    return _frac(_core.instanton_action())
