import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from toeplitz_boundary.errors import CutProximityError, DomainError, PreconditionError
from toeplitz_boundary.symbol import (
    SymbolSpec, cut_distance, e_of_phi, evaluate, factorize, fourier_coeffs, ising, single_pair,
)


def two_pair(k):
    return SymbolSpec(k, [(1, 0.3), (1j, -0.2)], [(1, 0.25), (-1j, 0.1)])


def test_ising_value_on_circle():
    assert evaluate(ising(0.5), 1j) == pytest.approx(0.894427191 + 0.447213595j, abs=1e-9)


def test_k_zero_reduces_to_one():
    xi = np.exp(1j * np.linspace(0, 6, 7))
    assert np.allclose(evaluate(ising(0.0), xi), 1)


@pytest.mark.parametrize("k", [0.1, 0.3, 0.5, 0.8])
def test_e_closed_form(k):
    assert e_of_phi(ising(k)) == pytest.approx(float(oracles.ising_E(k)), rel=1e-14)


def test_fourier_matches_binomial_series():
    ref = oracles.ising_fourier(0.4, 6)
    got = fourier_coeffs(ising(0.4), -6, 6)
    assert np.allclose(got, [complex(ref[j]) for j in range(-6, 7)], atol=1e-15)


def test_fourier_needs_unit_radius():
    from toeplitz_boundary.quadrature import QuadratureGrid

    with pytest.raises(PreconditionError):
        fourier_coeffs(ising(0.4), -2, 2, QuadratureGrid(0.9, 64))


@given(st.floats(0.05, 0.7), st.floats(0, 2 * np.pi))
def test_wiener_hopf_product(k, th):
    spec = single_pair(k, 0.3 + 0.1j, -0.4, psi_log={1: 0.2, -2: 0.1j})
    f = factorize(spec)
    xi = np.exp(1j * th)
    assert f.phi_plus(xi) * f.phi_minus(xi) == pytest.approx(evaluate(spec, xi), rel=1e-12)


def test_plus_factor_analytic_inside():
    # phi_+ has a Taylor expansion: its negative Fourier modes vanish
    f = factorize(two_pair(0.5))
    th = 2 * np.pi * np.arange(256) / 256
    c = np.fft.fft(f.phi_plus(np.exp(1j * th))) / 256
    assert np.max(np.abs(c[129:])) < 1e-13


@pytest.mark.parametrize("k", [0.2, 0.5])
def test_lambda_coefficients_decay(k):
    f = factorize(ising(k))
    r = f.radius
    c = f.lambda_coeffs(0, 60)
    C = f.cauchy_bound()
    j = np.arange(61)
    assert np.all(np.abs(c) <= C * r**j)
    # the true rate is |k|, not the contour radius
    # fit log|c_j| = j log rho + g log j + const above the rounding floor
    j = np.arange(3, int(25 / -np.log(k)))
    A = np.column_stack([j, np.log(j), np.ones_like(j, dtype=float)])
    coef = np.linalg.lstsq(A, np.log(np.abs(c[j])), rcond=None)[0]
    assert np.exp(coef[0]) == pytest.approx(k, rel=0.02)


@pytest.mark.parametrize("bad", [
    dict(k=1.0), dict(k=0.3, annulus_s=1.0), dict(k=0.3, plus=[(2, 0.1)]),
    dict(k=0.3, plus=[(1, 1.2)]), dict(k=0.3, plus=[(1, -1.0)]), dict(k=0.3, plus=[]),
    dict(k=0.3, psi={0: 1.0}),
])
def test_validation(bad):
    with pytest.raises(PreconditionError):
        SymbolSpec(bad["k"], bad.get("plus", [(1, 0.2)]), [(1, 0.1)],
                   bad.get("psi", {}), bad.get("annulus_s", 0.0))


def test_domain_and_cut_errors():
    with pytest.raises(DomainError):
        evaluate(ising(0.5), 0)
    with pytest.raises(CutProximityError):
        evaluate(ising(0.5), 2.0)   # on the cut [1/k, inf)
    with pytest.raises(CutProximityError):
        evaluate(ising(0.5), 0.25)  # on the cut [0, k]
    assert cut_distance(ising(0.5), 1j) > 0.5


cplx = st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False)


alpha = st.floats(-0.9, 0.9).filter(lambda a: abs(a) > 1e-6)


@given(cplx, alpha, alpha,
       st.dictionaries(st.integers(-3, 3).filter(bool), cplx, max_size=3))
def test_json_round_trip(k, ap, am, psi):
    spec = SymbolSpec(k * 0.9, [(1, ap), (-1, 0.1)], [(1j, am)], psi)
    again = SymbolSpec.from_json(json.dumps(json.loads(spec.to_json())))
    assert again == spec


def test_malformed_json():
    with pytest.raises(PreconditionError):
        SymbolSpec.from_dict({"plus_pairs": []})
