import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import beta as beta_fn

import oracles
from toeplitz_boundary.asymptotics import (
    ProbeConfig, ProbeReport, boundary_probe, contour_derivative, default_order, fit_exponent,
    predicted_exponent, probe_point, probe_root, radial_integral, selberg_constant,
    selberg_constant_general, selberg_monte_carlo,
)
from toeplitz_boundary.errors import AccuracyError, PoleError, PreconditionError
from toeplitz_boundary.symbol import SymbolSpec, ising, single_pair

alpha = st.builds(complex, st.floats(-3, 0.95), st.floats(-1, 1)).filter(
    lambda a: abs(a.imag) > 1e-3 or abs(a.real - round(a.real)) > 1e-3)


def test_selberg_trivial():
    assert selberg_constant(1, 0, 0) == pytest.approx(1, abs=1e-15)
    assert selberg_constant_general([1], [1], [0], [0]) == pytest.approx(1, abs=1e-15)


@given(alpha, alpha)
def test_selberg_n1_is_beta(ap, am):
    ref = mp.beta(1 - mp.mpc(ap), 1 - mp.mpc(am))
    got = selberg_constant(1, ap, am)
    assert abs(got - complex(ref)) <= 1e-12 * abs(complex(ref))


@given(st.integers(1, 4), alpha, alpha)
def test_general_collapses_to_single_pair(n, ap, am):
    a = selberg_constant(n, ap, am)
    b = selberg_constant_general([n], [n], [ap], [am])
    assert abs(a - b) <= 1e-12 * abs(a)


def test_selberg_pole():
    with pytest.raises(PoleError, match="alpha_plus"):
        selberg_constant(2, 2.0, 0.3)


def test_selberg_needs_equal_totals():
    with pytest.raises(PreconditionError):
        selberg_constant_general([1, 1], [1], [0.1, 0.2], [0.3])


def test_monte_carlo_beta_case():
    # for n = 1 the sampling density is the integrand itself, so the weights are constant
    val, err = selberg_monte_carlo([(1, 0.3), (1, -0.2)], samples=20_000, seed=3)
    assert val == pytest.approx(beta_fn(0.7, 1.2), rel=1e-12)
    assert err < 1e-12


def test_monte_carlo_small_sample_n2():
    val, err = selberg_monte_carlo([(2, 0.2), (2, -0.3)], samples=200_000, seed=5)
    ref = selberg_constant(2, 0.2, -0.3).real
    assert abs(val - ref) < 5 * err
    assert err < 0.01 * ref


def test_monte_carlo_is_reproducible():
    a = selberg_monte_carlo([(2, 0.5), (2, 0.5)], samples=50_000, seed=11)
    b = selberg_monte_carlo([(2, 0.5), (2, 0.5)], samples=50_000, seed=11)
    assert a == b


@pytest.mark.parametrize("n,beta,lam,mu,delta", [
    (1, 0.5, 2, 1e-3, 0.25), (1, 0.0, 2, 0.05, 0.3), (2, 0.5, 7, 1e-2, 0.25),
    (3, 0.7, 16, 1e-3, 0.2), (1, 0.3 + 0.4j, 2, 1e-2, 0.25),
])
def test_radial_matches_hypergeometric(n, beta, lam, mu, delta):
    got = radial_integral(n, beta, None, lam, mu, delta)
    ref = complex(oracles.radial(n, beta, lam, mu, delta))
    assert abs(got - ref) <= 1e-10 * abs(ref)


def test_radial_constant_denominator_regime():
    n, beta, lam, mu, delta = 1, 0.5, 2, 1e3, 0.25
    a = 2 * n * n - beta * n
    approx = mu ** (-lam - 1) * delta**a / a
    assert radial_integral(n, beta, None, lam, mu, delta) == pytest.approx(approx, rel=1e-3)


def test_radial_scaling_limit_is_beta():
    mu = 1e-6
    ratio = radial_integral(1, 0.5, 0.5, 2, mu, 0.25) / mu ** (0 - 0.5 - 1)
    assert ratio.real == pytest.approx(math.pi / 8, rel=1e-3)


@pytest.mark.parametrize("mu", [1e-4, 1e-6])
def test_radial_limit_independent_of_delta(mu):
    scale = mu ** (0 - 0.5 - 1)
    a = radial_integral(1, 0.5, 0.5, 2, mu, 0.2) / scale
    b = radial_integral(1, 0.5, 0.5, 2, mu, 0.4) / scale
    # after r -> mu r the two differ by int_{0.2/mu}^{0.4/mu} r^(1/2) (1+r)^-3 dr
    gap = mp.quad(lambda r: mp.sqrt(r) / (1 + r) ** 3, [0.2 / mu, 0.4 / mu])
    assert abs((b - a).real - float(gap)) < 1e-9 * abs(a)
    assert abs(b - a) / abs(a) < 2 * (mu / 0.2) ** 1.5


@pytest.mark.parametrize("n,b", [(1, 0.0), (1, 0.5), (2, 0.5), (3, 0.7)])
def test_radial_power_law(n, b):
    mus = np.geomspace(1e-2, 1e-4, 9)
    vals = [radial_integral(n, b, b, None, mu, 0.25) for mu in mus]
    slope, _ = fit_exponent(mus, vals)
    assert abs(slope - predicted_exponent(n, b)) < 0.02


def test_radial_rejects_nonintegrable():
    with pytest.raises(PreconditionError, match="beta"):
        radial_integral(1, 2.5, None, 2, 0.1, 0.25)


@given(st.integers(1, 8), st.complex_numbers(max_magnitude=4, allow_nan=False))
def test_predicted_exponent_range(n, beta):
    e = predicted_exponent(n, beta)
    assert -2 < e <= -1


def test_default_order():
    assert default_order(1, 0) == 2
    assert default_order(2, 0.5) == 7
    assert default_order(3, 0.7) == 16


def test_fit_exponent_exact_power():
    mus = np.geomspace(0.1, 1e-3, 6)
    slope, resid = fit_exponent(mus, 3 * mus**-1.25)
    assert slope == pytest.approx(-1.25, abs=1e-12)
    assert max(map(abs, resid)) < 1e-12


@pytest.mark.parametrize("order", [0, 1, 3, 6])
def test_contour_derivative_exp(order):
    z0 = 0.2 + 0.1j
    val, noise = contour_derivative(cmath.exp, z0, order, 0.3)
    assert abs(val - cmath.exp(z0)) < 1e-12 + noise


def test_contour_derivative_rational():
    # d^4/dz^4 1/(1 - z) = 24/(1 - z)^5
    z0 = 0.3
    val, _ = contour_derivative(lambda z: 1 / (1 - z), z0, 4, 0.2)
    assert val == pytest.approx(24 / 0.7**5, rel=1e-10)


def test_contour_derivative_gives_up():
    with pytest.raises(AccuracyError):
        contour_derivative(lambda z: 1 / (1 - z), 0.0, 2, 0.99, max_nodes=32, rtol=1e-14)


def test_interior_derivative_matches_oracle():
    # S_1 as a function of kappa = k^2, at a point well inside the disc
    val, noise = probe_point(ising(0.7), 1, 2, 0.5)
    ref = mp.diff(lambda kap: oracles.ising_s1(mp.sqrt(kap)), mp.mpf("0.5"), 2)
    assert abs(val - complex(ref)) < 1e-10 * abs(complex(ref)) + noise


def test_probe_root_single_pair():
    eps, part = probe_root(ising(0.5), 3)
    assert abs(eps**3 - 1) < 1e-12 and abs(eps - 1) > 0.1
    assert part.n_p == (3,) and part.n_q == (3,)
    with pytest.raises(PreconditionError, match="root_selector"):
        probe_root(ising(0.5), 2, selector=0)


def test_probe_root_excludes_shorter_products():
    spec = SymbolSpec(0.5, [(1, 0.3), (1j, 0.1)], [(1, 0.2)])
    eps, part = probe_root(spec, 2)
    for p in (1, 1j):
        assert abs(eps * p - 1) > 1e-10


def test_probe_config_target_tuple():
    assert ProbeConfig(1, target_m=2).target_m == (2,)
    assert ProbeConfig(1, target_m=[2, 3]).target_m == (2, 3)
    with pytest.raises(PreconditionError):
        ProbeConfig(1, target_m=(2, 4))
    with pytest.raises(PreconditionError):
        ProbeConfig(1, target_m=(0,))


def test_probe_point_sums_summands():
    kap = 0.3
    a, _ = probe_point(ising(0.6), (1, 2), 1, kap)
    b, _ = probe_point(ising(0.6), 1, 1, kap)
    c, _ = probe_point(ising(0.6), 2, 1, kap)
    assert abs(a - (b + c)) < 1e-10 * abs(a)


@pytest.mark.parametrize("kw", [
    dict(mu_grid=(0.1, 0.2)), dict(mu_grid=(0.1, 1e-5)), dict(mu_grid=(0.1,)),
    dict(delta=0.5), dict(route="other"), dict(n=4), dict(n=7, route="reduced"),
])
def test_probe_config_validation(kw):
    args = dict(n=1) | kw
    with pytest.raises(PreconditionError):
        ProbeConfig(**args)


@pytest.mark.parametrize("n,ap,am", [(1, 0.25, 0.25), (2, 0.25, 0.25), (3, 0.3, 0.4), (4, -0.2, 0.5)])
def test_reduced_probe_recovers_exponent(n, ap, am):
    spec = single_pair(0.5, ap, am)
    cfg = ProbeConfig(n, route="reduced", mu_grid=tuple(np.geomspace(1e-2, 1e-4, 9)))
    r = boundary_probe(spec, cfg)
    assert r.passed and not r.inconclusive
    assert r.order == default_order(n, ap + am)


def test_report_json_fields():
    r = ProbeReport(-1.0, -1.0, [0.0], True, epsilon=-1 + 0j, derivatives=[1 + 2j])
    d = r.to_dict()
    assert d["pass"] is True and "passed" not in d
    assert d["epsilon"] == [-1.0, 0.0] and d["derivatives"] == [[1.0, 2.0]]
    assert {"fitted_exponent", "predicted_exponent", "residuals"} <= set(d)
