"""Certified summation of chi(k) = sum_N [D_N - E] and S(k) = sum_N [det(I - K_N) - 1]."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, PreconditionError
from .symbol import SymbolSpec, e_of_phi, factorize, fourier_coeffs
from .toeplitz import build_truncation, fredholm_det, toeplitz_det

FIT_WINDOW = 5
MAX_TERMS = 2000
DIVERGENCE_AFTER = 50
K_GUARD = 0.9


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    terms_used: int
    last_term: float
    tail_estimate: float
    ratio_estimate: float


def fit_ratio(terms) -> float:
    """Geometric ratio of |terms| from a least-squares fit of log|t_N| against N."""
    mags = np.abs(np.asarray(terms))
    if np.any(mags == 0):
        return 0.0
    slope = np.polyfit(np.arange(len(mags)), np.log(mags), 1)[0]
    return float(math.exp(slope))


def fsum_complex(terms) -> complex:
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def sum_geometric(term, tol: float, noise: float = 0.0, start: int = 1) -> SeriesResult:
    """Sum term(start), term(start+1), ... until the extrapolated tail is below tol.

    Terms smaller than ``noise`` are treated as rounding-level; once a full fit
    window sits below it the sum stops and the tail is reported as ``noise``.
    """
    if not tol > 0:
        raise PreconditionError(f"tol: must be positive, got {tol}")
    terms: list[complex] = []
    N = start
    while True:
        terms.append(complex(term(N)))
        n = len(terms)
        if n >= FIT_WINDOW:
            window = terms[-FIT_WINDOW:]
            last = abs(window[-1])
            if all(abs(t) <= noise for t in window):
                return SeriesResult(fsum_complex(terms), n, last, max(noise, last), 0.0)
            rho = fit_ratio(window)
            if rho < 1:
                tail = last * rho / (1 - rho)
                if tail < tol:
                    return SeriesResult(fsum_complex(terms), n, last, tail, rho)
            elif n >= DIVERGENCE_AFTER:
                raise DivergenceError(
                    f"term ratio {rho:.4f} >= 1 after {n} terms; k too close to |k| = 1"
                )
        if n >= MAX_TERMS:
            raise DivergenceError(f"no convergence to {tol:g} within {MAX_TERMS} terms")
        N += 1


def _guard(spec: SymbolSpec):
    if abs(spec.k) > K_GUARD:
        raise PreconditionError(f"k: direct summation needs |k| <= {K_GUARD}, got {spec.k}")


def chi(spec: SymbolSpec, tol: float = 1e-10) -> SeriesResult:
    """chi(k) = sum_{N>=1} [D_N(phi) - E(phi)]."""
    _guard(spec)
    E = e_of_phi(spec)
    cache = {"C": 0, "coeffs": None}

    def term(N):
        if N - 1 > cache["C"]:
            C = max(64, 2 * cache["C"], N)
            cache["coeffs"] = fourier_coeffs(spec, -C, C)
            cache["C"] = C
        return toeplitz_det(spec, N, cache["coeffs"]) - E

    return sum_geometric(term, tol, noise=64 * np.finfo(float).eps * max(1.0, abs(E)))


def s_series(spec: SymbolSpec, tol: float = 1e-10) -> SeriesResult:
    """S(k) = sum_{N>=1} [det(I - K_N) - 1]."""
    _guard(spec)
    fact = factorize(spec)

    def term(N):
        return fredholm_det(build_truncation(fact, N)) - 1

    return sum_geometric(term, tol, noise=64 * np.finfo(float).eps)


def series_terms(spec: SymbolSpec, which: str, N_max: int) -> np.ndarray:
    """The first N_max summands of chi ('chi') or S ('s'), for diagnostics."""
    if which == "chi":
        E = e_of_phi(spec)
        c = fourier_coeffs(spec, -N_max, N_max)
        return np.array([toeplitz_det(spec, N, c) - E for N in range(1, N_max + 1)])
    if which == "s":
        fact = factorize(spec)
        return np.array([fredholm_det(build_truncation(fact, N)) - 1 for N in range(1, N_max + 1)])
    raise PreconditionError(f"which: expected 'chi' or 's', got {which!r}")
