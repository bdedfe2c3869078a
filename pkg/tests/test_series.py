import numpy as np
import pytest

import oracles
from toeplitz_boundary.errors import DivergenceError, PreconditionError
from toeplitz_boundary.series import chi, fit_ratio, s_series, series_terms, sum_geometric
from toeplitz_boundary.symbol import SymbolSpec, e_of_phi, ising


def two_pair(k):
    return SymbolSpec(k, [(1, 0.3), (1j, -0.2)], [(1, 0.25), (-1j, 0.1)])


@pytest.mark.parametrize("make", [ising, two_pair])
@pytest.mark.parametrize("k", [0.2, 0.4])
def test_chi_equals_E_times_S(make, k):
    spec = make(k)
    c = chi(spec, 1e-12).value
    s = s_series(spec, 1e-12).value
    assert abs(c - e_of_phi(spec) * s) < 1e-12


def test_chi_from_multiprecision_determinants():
    k = 0.3
    E = oracles.ising_E(k)
    ref = sum(complex(oracles.ising_toeplitz_det(k, N) - E) for N in range(1, 25))
    assert chi(ising(k), 1e-14).value == pytest.approx(ref, rel=1e-10)


def test_terms_decay_like_kappa():
    t = series_terms(ising(0.5), "s", 12)
    assert fit_ratio(t[4:]) == pytest.approx(0.25, rel=0.25)


def test_sum_geometric_exact():
    r = sum_geometric(lambda N: 0.5**N, 1e-14)
    assert r.value == pytest.approx(1.0, abs=1e-13)
    assert r.ratio_estimate == pytest.approx(0.5)


def test_sum_geometric_divergence():
    with pytest.raises(DivergenceError):
        sum_geometric(lambda N: 1.01**N, 1e-10)


def test_guard_near_unit_circle():
    with pytest.raises(PreconditionError):
        chi(ising(0.95))


def test_zero_symbol():
    assert chi(ising(0.0)).value == 0
    assert s_series(ising(0.0)).value == 0


def test_bad_selector():
    with pytest.raises(PreconditionError):
        series_terms(ising(0.3), "x", 3)


def test_terms_agree_pointwise():
    spec = ising(0.35)
    a = series_terms(spec, "chi", 8)
    b = series_terms(spec, "s", 8) * e_of_phi(spec)
    assert np.max(np.abs(a - b)) < 1e-14
