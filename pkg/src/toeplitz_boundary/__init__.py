"""Toeplitz determinants with deformed Fisher-Hartwig symbols: the Fredholm
determinant side, the multiple-integral expansion S(k) = sum S_n(k), and
numerical probes of its singular behaviour on the unit circle."""

from .errors import NumericalError, PreconditionError
from .symbol import SymbolSpec, e_of_phi, evaluate, factorize, fourier_coeffs, ising, single_pair
from .toeplitz import fredholm_det, fredholm_terms, gcbo_residual, toeplitz_det

__all__ = [
    "NumericalError", "PreconditionError", "SymbolSpec", "e_of_phi", "evaluate", "factorize",
    "fourier_coeffs", "ising", "single_pair", "fredholm_det", "fredholm_terms",
    "gcbo_residual", "toeplitz_det",
]
