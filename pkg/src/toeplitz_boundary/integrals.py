"""The n-fold contour integrals S_n(k) and the determinant identity behind them.

With du(x) = Lambda(1/x) dx / (2 pi i) and dv(y) = Lambda(y)^-1 dy / (2 pi i) on a
circle of radius in (|k|, 1),

    S_n = (-1)^n / (n!)^2  int prod(x_i y_i) / (1 - prod(x_i y_i)) det(1/(1 - x_i y_j))^2  du^n dv^n

and sum_N [det(I - K_N) - 1] = sum_n S_n.  ``s_n`` evaluates this form with a
tensor trapezoid rule.  ``integrand_sn1``/``integrand_sn2`` are the integrands
after rescaling x -> k x, y -> k y (unit-circle variables, kappa = k^2), which
differ only by the Cauchy determinant evaluation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, PreconditionError, SingularityError
from .quadrature import QuadratureGrid
from .series import s_series
from .symbol import Factorization, SymbolSpec, factorize

POLE_TOL = 1e-10
NODE_CAPS = {1: 4096, 2: 256, 3: 64}


# integrands -----------------------------------------------------------------


def vandermonde(z: np.ndarray) -> np.ndarray:
    """prod_{i<j} (z_j - z_i) over the last axis."""
    n = z.shape[-1]
    out = np.ones(z.shape[:-1], dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            out = out * (z[..., j] - z[..., i])
    return out


def _as_tuples(x, n):
    x = np.asarray(x, dtype=complex)
    if x.shape[-1] != n:
        raise PreconditionError(f"x, y: last axis must have length n = {n}, got {x.shape}")
    return x


def _pole_factor(kappa, n, x, y):
    prod = np.prod(x * y, axis=-1)
    den = 1 - kappa**n * prod
    if np.any(np.abs(den) < POLE_TOL):
        raise SingularityError(f"|1 - kappa^n prod x_i y_i| < {POLE_TOL:g}")
    return prod / den


def _lambda_ratio(fact: Factorization, x, y):
    """prod_i Lambda(1/(k x_i)) / Lambda(k y_i)."""
    k = fact.spec.k
    return np.exp(np.sum(fact.log_lambda(1 / (k * x)) - fact.log_lambda(k * y), axis=-1))


def _leibniz_det(C):
    """Determinant over the last two axes by the permutation expansion, and the
    sum of the moduli of its terms (the scale against which rounding acts)."""
    n = C.shape[-1]
    out, scale = 0, 0
    for perm in itertools.permutations(range(n)):
        inv = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        term = 1
        for i, j in enumerate(perm):
            term = term * C[..., i, j]
        out = out - term if inv % 2 else out + term
        scale = scale + abs(term)
    return out, scale


def _cauchy_det_mp(kappa, x, y, digits):
    import mpmath

    with mpmath.workdps(digits):
        kap = mpmath.mpc(complex(kappa))
        C = mpmath.matrix([[1 / (1 - kap * mpmath.mpc(complex(a)) * mpmath.mpc(complex(b)))
                            for b in y] for a in x])
        return complex(mpmath.det(C))


def cauchy_det(kappa, x, y):
    """det(1/(1 - kappa x_i y_j)) straight from the matrix.

    The determinant is O(kappa^(n(n-1)/2) Delta(x) Delta(y)) while the entries
    are O(1).  The expansion runs in extended precision, and tuples where the
    cancellation still eats past 1e-14 relative are redone in multiprecision.
    """
    x, y = np.asarray(x), np.asarray(y)
    if x.shape[-1] > 4:
        C = 1 / (1 - kappa * x[..., :, None] * y[..., None, :])
        return np.linalg.det(C)
    batch, n = x.shape[:-1], x.shape[-1]
    x, y = x.reshape(-1, n), y.reshape(-1, n)
    xe = x.astype(np.clongdouble)
    ye = y.astype(np.clongdouble)
    C = 1 / (1 - np.clongdouble(kappa) * xe[:, :, None] * ye[:, None, :])
    d, scale = _leibniz_det(C)
    d = np.asarray(d).astype(complex)
    loss = (scale / np.maximum(np.abs(d), 1e-300)).astype(float)
    for i in np.nonzero(loss * float(np.finfo(np.longdouble).eps) > 1e-14)[0]:
        d[i] = _cauchy_det_mp(kappa, x[i], y[i], 20 + int(math.log10(loss[i])))
    return d.reshape(batch)


def integrand_sn1(spec: SymbolSpec, n: int, x, y, fact: Factorization | None = None):
    """Rescaled S_n integrand with the squared determinant det(1/(1 - kappa x_i y_j))^2."""
    x, y = _as_tuples(x, n), _as_tuples(y, n)
    if spec.k == 0:
        return np.zeros(x.shape[:-1], dtype=complex)
    fact = fact or factorize(spec)
    kap = spec.kappa
    return (kap ** (2 * n) * _pole_factor(kap, n, x, y) * cauchy_det(kap, x, y) ** 2
            * _lambda_ratio(fact, x, y))


def integrand_sn2(spec: SymbolSpec, n: int, x, y, fact: Factorization | None = None):
    """Rescaled S_n integrand in Vandermonde form."""
    x, y = _as_tuples(x, n), _as_tuples(y, n)
    if spec.k == 0:
        return np.zeros(x.shape[:-1], dtype=complex)
    fact = fact or factorize(spec)
    kap = spec.kappa
    den = np.prod(1 - kap * x[..., :, None] * y[..., None, :], axis=(-2, -1))
    return (kap ** (n * (n + 1)) * _pole_factor(kap, n, x, y)
            * vandermonde(x) ** 2 * vandermonde(y) ** 2 / den**2
            * _lambda_ratio(fact, x, y))


def integrand_unscaled(fact: Factorization, n: int, x, y):
    """Integrand of S_n in the original circle variables (no differentials)."""
    x, y = _as_tuples(x, n), _as_tuples(y, n)
    lam = np.exp(np.sum(fact.log_lambda(1 / x) - fact.log_lambda(y), axis=-1))
    return _pole_factor(1.0, n, x, y) * _det_sq(x, y) * lam


# quadrature -------------------------------------------------------------------


@dataclass(frozen=True)
class SnResult:
    value: complex
    nodes: int
    est_error: float
    radius: float


def default_radius(spec: SymbolSpec) -> float:
    """Balances the decay (|k|/r)^M of the symbol part against r^(2M) from 1/(1 - x y)."""
    lo = max(abs(spec.k), spec.annulus_s)
    return lo ** (1 / 3) if lo > 0 else 0.5


def _det_sq(x, y):
    C = 1 / (1 - x[..., :, None] * y[..., None, :])
    if C.shape[-1] == 1:
        return C[..., 0, 0] ** 2
    if C.shape[-1] == 2:
        return (C[..., 0, 0] * C[..., 1, 1] - C[..., 0, 1] * C[..., 1, 0]) ** 2
    a, b, c = C[..., 0, 0], C[..., 0, 1], C[..., 0, 2]
    d, e, f = C[..., 1, 0], C[..., 1, 1], C[..., 1, 2]
    g, h, i = C[..., 2, 0], C[..., 2, 1], C[..., 2, 2]
    return (a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)) ** 2


def _tensor_sum(fact: Factorization, n: int, radius: float, M: int):
    """Trapezoid value of S_n with M nodes per variable, and the sum of |summands|."""
    t = radius * np.exp(2j * np.pi * np.arange(M) / M)
    wu = t * np.exp(fact.log_lambda(1 / t))      # x du/dx, from dx/(2 pi i) = x dtheta/(2 pi)
    wv = t * np.exp(-fact.log_lambda(t))
    idx = np.array(list(itertools.product(range(M), repeat=n)))
    X, Y = t[idx], t[idx]                          # (M^n, n) tuples
    WX, WY = np.prod(wu[idx], axis=1), np.prod(wv[idx], axis=1)
    total, mag = 0j, 0.0
    chunk = max(1, (1 << 20) // len(idx))
    for s in range(0, len(idx), chunk):
        xs = X[s:s + chunk, None, :]
        ys = Y[None, :, :]
        prod = np.prod(xs * ys, axis=-1)
        f = prod / (1 - prod) * _det_sq(xs, ys) * WX[s:s + chunk, None] * WY[None, :]
        total += f.sum()
        mag += np.abs(f).sum()
    scale = (-1) ** n / math.factorial(n) ** 2 / M ** (2 * n)
    return total * scale, mag * abs(scale)


def s_n(spec: SymbolSpec, n: int, grid: QuadratureGrid | None = None,
        rtol: float = 1e-9, fact: Factorization | None = None) -> SnResult:
    """S_n(k) by 2n-fold tensor trapezoid quadrature, nodes doubled until converged.

    The error of the finest value is estimated from the last two differences,
    d_2^2 / d_1 (geometric convergence), or by d_2 alone when only two values
    exist.  It must fall below ``rtol`` relative, or below the rounding floor of
    the sum when S_n is far smaller than its individual summands.
    """
    if not 1 <= n <= 3:
        raise PreconditionError(f"n: supported 1..3, got {n}")
    if spec.k == 0 and not spec.psi_log:
        return SnResult(0j, 0, 0.0, 0.0)
    fact = fact or factorize(spec)
    if grid is None:
        grid = QuadratureGrid(default_radius(spec), {1: 32, 2: 16, 3: 4}[n])
    r = grid.radius
    lo = max(abs(spec.k), spec.annulus_s)
    if not lo < r < 1:
        raise PreconditionError(f"grid.radius: need {lo} < r < 1, got {r}")
    M = grid.nodes_per_dim
    prev, _ = _tensor_sum(fact, n, r, M)
    last_diff = None
    while True:
        M *= 2
        if M > NODE_CAPS[n]:
            raise AccuracyError(f"S_{n}: no convergence within {NODE_CAPS[n]} nodes per variable")
        cur, mag = _tensor_sum(fact, n, r, M)
        diff = abs(cur - prev)
        err = diff
        if last_diff is not None and diff < last_diff:
            err = diff * diff / last_diff
        floor = 1e3 * np.finfo(float).eps * mag
        if err <= max(rtol * abs(cur), floor):
            return SnResult(complex(cur), M, max(err, floor), r)
        prev, last_diff = cur, diff


# sum over N against the S_n ---------------------------------------------


@dataclass(frozen=True)
class PropositionReport:
    lhs: complex
    rhs: complex
    terms: tuple
    difference: float
    omitted_estimate: float
    tol: float
    passed: bool


def proposition_check(spec: SymbolSpec, n_max: int = 2, tol: float = 1e-7,
                      grid: QuadratureGrid | None = None) -> PropositionReport:
    """Compare sum_N [det(I - K_N) - 1] with sum_{n <= n_max} S_n(k).

    The first omitted term is estimated as |S_nmax| |kappa|^(2 n_max + 2), the
    growth of the kappa prefactor from one order to the next.
    """
    if not 1 <= n_max <= 3:
        raise PreconditionError(f"n_max: supported 1..3, got {n_max}")
    if spec.k == 0 and not spec.psi_log:
        return PropositionReport(0j, 0j, (0j,) * n_max, 0.0, 0.0, tol, True)
    fact = factorize(spec)
    lhs = s_series(spec, tol=min(tol, 1e-12) / 10).value
    terms = tuple(s_n(spec, n, grid if n == 1 else None, fact=fact).value
                  for n in range(1, n_max + 1))
    rhs = sum(terms)
    omitted = abs(terms[-1]) * abs(spec.kappa) ** (2 * n_max + 2)
    diff = abs(lhs - rhs)
    return PropositionReport(lhs, rhs, terms, diff, omitted, tol, diff <= tol + omitted)


# discrete measures ------------------------------------------------------------


@dataclass(frozen=True)
class AndreiefResult:
    lhs: complex
    rhs: complex
    tail_bound: float


def _check_measure(m, name):
    pts = np.array([complex(p) for p, _ in m])
    if len(pts) > 6:
        raise PreconditionError(f"{name}: at most 6 atoms, got {len(pts)}")
    if len(pts) and np.max(np.abs(pts)) >= 1:
        raise PreconditionError(f"{name}: atoms must lie strictly inside the unit circle")
    return pts, np.array([complex(w) for _, w in m])


def discrete_integral(measure_u, measure_v, n: int, N: int | None = None,
                      form: str = "squared") -> complex:
    """n-fold integral against discrete measures.

    form='squared':  (1/n!) int F det(1/(1 - x_i y_j))^2
    form='raw':      int F det(1/(1 - x_i y_j)) prod_i 1/(1 - x_i y_i)
    with F = (prod x_i y_i)^N, or prod x_i y_i / (1 - prod x_i y_i) when N is None.
    """
    xu, wu = _check_measure(measure_u, "measure_u")
    yv, wv = _check_measure(measure_v, "measure_v")
    if len(xu) == 0 or len(yv) == 0:
        return 0j
    total = 0j
    # a repeated atom gives two equal rows (or columns) of C, so det C = 0 exactly
    for a in itertools.permutations(range(len(xu)), n):
        x = xu[list(a)]
        for b in itertools.permutations(range(len(yv)), n):
            y = yv[list(b)]
            prod = np.prod(x * y)
            F = prod**N if N is not None else prod / (1 - prod)
            C = 1 / (1 - np.outer(x, y))
            d = np.linalg.det(C)
            if form == "squared":
                core = d * d / math.factorial(n)
            elif form == "raw":
                core = d * np.prod(1 / (1 - x * y))
            else:
                raise PreconditionError(f"form: expected 'squared' or 'raw', got {form!r}")
            total += np.prod(wu[list(a)]) * np.prod(wv[list(b)]) * F * core
    return complex(total)


def _kn_section(xu, wu, yv, wv, N, P):
    p = np.arange(P)
    hu = (wu[None, :] * xu[None, :] ** (N + p[:, None])) @ (xu[:, None] ** p[None, :])
    # hu[p, m] = sum_a w_a x_a^(N+p+m); the shared index m runs over [0, P)
    hv = (wv[None, :] * yv[None, :] ** (N + p[:, None])) @ (yv[:, None] ** p[None, :])
    return hu @ hv.T


def andreief_oracle(measure_u, measure_v, n: int, N: int | None = None,
                    P: int = 200) -> AndreiefResult:
    """Both sides of the Hankel-product identity for discrete measures.

    lhs: sum over p_1..p_n in [0, P) of det(K_N(p_i, p_j)), summed over N >= 1
    (or at the single N given), with K_N built from explicit P x P sections of
    the two Hankel matrices.  rhs: the n-fold integral of ``discrete_integral``.
    """
    if n not in (1, 2):
        raise PreconditionError(f"n: brute force supports n in (1, 2), got {n}")
    xu, wu = _check_measure(measure_u, "measure_u")
    yv, wv = _check_measure(measure_v, "measure_v")
    rhs = discrete_integral(measure_u, measure_v, n, N)
    if len(xu) == 0 or len(yv) == 0:
        return AndreiefResult(0j, rhs, 0.0)
    q = float(np.max(np.abs(xu)) * np.max(np.abs(yv)))
    if N is not None:
        Ns = [N]
    elif q == 0:
        Ns = [1]
    else:
        Ns = range(1, max(2, int(math.log(1e-20) / math.log(q)) + 2))
    lhs = 0j
    for NN in Ns:
        K = _kn_section(xu, wu, yv, wv, NN, P)
        if n == 1:
            lhs += np.trace(K)
        else:
            d = np.diag(K)
            lhs += np.sum(d[:, None] * d[None, :] - K * K.T)
    xmax, ymax = np.max(np.abs(xu)), np.max(np.abs(yv))
    W = np.sum(np.abs(wu)) * np.sum(np.abs(wv))
    Nmin = min(Ns)
    # entries are bounded by W q^N xmax^p ymax^q / (1 - q); dropping p >= P loses at most this
    tail = n * W**n * q ** (n * Nmin) * max(xmax, ymax) ** P / (1 - q) ** (n + 1) / (1 - max(xmax, ymax))
    return AndreiefResult(complex(lhs), rhs, float(tail))
