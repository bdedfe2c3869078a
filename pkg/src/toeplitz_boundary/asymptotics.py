"""Simplex constants, the reduced radial integral, and the boundary probe.

Near a root eps of kappa^n = prod (u v)^-1 the lambda-th kappa-derivative of
S_n(k) grows like mu^([bn] - beta n - 1), mu the radial distance parameter.
``boundary_probe`` measures that exponent numerically: either from S_n itself
(contour differentiation) or from the one-dimensional radial integral that
carries the leading behaviour.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import loggamma

from .errors import AccuracyError, GeometryError, PoleError, PreconditionError
from .minima import NonUnique, minimal_partition_pair
from .symbol import SymbolSpec
from .toeplitz import fredholm_terms

POLE_TOL = 1e-12
FIT_POINTS = 4
PASS_TOL = 0.1
INCONCLUSIVE_RESIDUAL = 0.2
MIN_MU = 1e-4
F_NOISE = 1e-14
NOISE_SHARE = 0.05


# simplex constants -------------------------------------------------------------


def _lgamma(z, where: str) -> complex:
    z = complex(z)
    if abs(z.imag) < POLE_TOL and z.real <= POLE_TOL and abs(z.real - round(z.real)) < POLE_TOL:
        raise PoleError(z, where)
    return complex(loggamma(z))


def _group_log(m: int, alpha: complex, label: str) -> complex:
    """log prod_{j<m} Gamma(j+2) Gamma(j - alpha + 1)."""
    return sum(_lgamma(j + 2, label) + _lgamma(j - alpha + 1, f" in Gamma(j - {label} + 1), j={j}")
               for j in range(m))


def selberg_constant(n: int, alpha_plus: complex, alpha_minus: complex) -> complex:
    """Integral of Delta(xi)^2 Delta(eta)^2 prod xi_i^-a+ eta_i^-a- over the simplex
    sum(xi) + sum(eta) = 1 (Lebesgue measure in 2n - 1 coordinates):

        prod_{j<n} Gamma(j+2)^2 Gamma(j - a+ + 1) Gamma(j - a- + 1) / Gamma(2n^2 - beta n)
    """
    if n < 1:
        raise PreconditionError(f"n: need n >= 1, got {n}")
    beta = complex(alpha_plus) + complex(alpha_minus)
    log = (_group_log(n, complex(alpha_plus), "alpha_plus")
           + _group_log(n, complex(alpha_minus), "alpha_minus")
           - _lgamma(2 * n * n - beta * n, " in Gamma(2n^2 - beta n)"))
    return complex(cmath.exp(log))


def selberg_constant_general(partition_p, partition_q, alphas_p, alphas_q) -> complex:
    """The same simplex integral with the Vandermondes split into groups.

    Group p holds n_p of the xi with exponent -alpha_p, group q holds n_q of the
    eta with exponent -alpha_q; only variables in the same group interact.
    """
    if len(partition_p) != len(alphas_p) or len(partition_q) != len(alphas_q):
        raise PreconditionError("partition_p/partition_q: lengths must match the exponent lists")
    if any(m < 0 for m in list(partition_p) + list(partition_q)):
        raise PreconditionError("partition: parts must be nonnegative")
    if sum(partition_p) != sum(partition_q) or sum(partition_p) < 1:
        raise PreconditionError(
            f"partition: need sum n_p = sum n_q >= 1, got {sum(partition_p)} and {sum(partition_q)}"
        )
    deg = 0j
    log = 0j
    for i, (m, a) in enumerate(zip(partition_p, alphas_p)):
        deg += m * (m - complex(a))
        log += _group_log(m, complex(a), f"alpha_p[{i}]")
    for i, (m, a) in enumerate(zip(partition_q, alphas_q)):
        deg += m * (m - complex(a))
        log += _group_log(m, complex(a), f"alpha_q[{i}]")
    log -= _lgamma(deg, " in the normalizing Gamma")
    return complex(cmath.exp(log))


def selberg_monte_carlo(groups, samples: int = 10**7, seed: int = 0,
                        batch: int = 10**6) -> tuple[float, float]:
    """Monte Carlo value and standard error of the grouped simplex integral.

    ``groups`` lists (size, alpha) for every group, xi and eta groups alike.
    Points are drawn from the Dirichlet law with parameters 1 - alpha, which
    absorbs the power singularities; the estimator is B(1 - alpha) E[prod Delta^2].
    Real exponents only.
    """
    alphas = []
    for m, a in groups:
        if complex(a).imag != 0 or not complex(a).real < 1:
            raise PreconditionError(f"alpha: Monte Carlo needs real alpha < 1, got {a}")
        alphas += [float(complex(a).real)] * m
    conc = 1 - np.array(alphas)
    log_b = float(np.sum(loggamma(conc)).real - loggamma(conc.sum()).real)
    rng = np.random.Generator(np.random.Philox(seed))
    total = total_sq = 0.0
    done = 0
    while done < samples:
        size = min(batch, samples - done)
        pts = rng.dirichlet(conc, size)
        val = np.ones(size)
        start = 0
        for m, _ in groups:
            g = pts[:, start:start + m]
            for i, j in itertools.combinations(range(m), 2):
                val *= (g[:, i] - g[:, j]) ** 2
            start += m
        total += val.sum()
        total_sq += (val * val).sum()
        done += size
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    scale = math.exp(log_b)
    return scale * mean, scale * math.sqrt(var / samples)


# radial integral -----------------------------------------------------------------


def predicted_exponent(n: int, beta: complex) -> float:
    """[bn] - b n - 1 with b = Re beta; always in (-2, -1]."""
    bn = complex(beta).real * n
    return math.floor(bn + 1e-12) - bn - 1


def default_order(n: int, beta: complex) -> int:
    return 2 * n * n - math.floor(complex(beta).real * n + 1e-12)


def radial_integral(n: int, beta: complex, b: float | None, lam: int | None,
                    mu: float, delta: float) -> complex:
    """int_0^delta r^(2n^2 - beta n - 1) (mu + r)^-(lam + 1) dr.

    Computed in the variable t = log r, split at log mu where the denominator
    turns over; relative accuracy about 1e-12.
    """
    beta = complex(beta)
    if b is None:
        b = beta.real
    if lam is None:
        lam = 2 * n * n - math.floor(b * n + 1e-12)
    if not mu > 0:
        raise PreconditionError(f"mu: must be positive, got {mu}")
    if not 0 < delta < 0.5:
        raise PreconditionError(f"delta: need 0 < delta < 1/2, got {delta}")
    if lam < 0:
        raise PreconditionError(f"lam: must be >= 0, got {lam}")
    a = 2 * n * n - beta * n
    if a.real <= 0:
        raise PreconditionError(f"beta: endpoint r = 0 not integrable, Re(2n^2 - beta n) = {a.real}")
    hi = math.log(delta)
    mid = min(math.log(mu), hi)
    # below t_lo the integrand is e^(a t) mu^-(lam+1) to within 1e-17 relative
    t_lo = mid - 40.0 / a.real

    def part(fn, lo, up):
        if up <= lo:
            return 0.0
        val, _ = integrate.quad(fn, lo, up, epsabs=0.0, epsrel=1e-13, limit=400)
        return val

    def f(t, which):
        r = math.exp(t)
        v = cmath.exp(a * t) * (mu + r) ** (-lam - 1)
        return v.real if which == 0 else v.imag

    out = 0j
    for which, unit in ((0, 1), (1, 1j)):
        g = lambda t, w=which: f(t, w)  # noqa: E731
        out += unit * (part(g, t_lo, mid) + part(g, mid, hi))
    # analytic remainder on (-inf, t_lo): mu^-(lam+1) e^(a t_lo) / a
    out += mu ** (-lam - 1) * cmath.exp(a * t_lo) / a
    return out


def fit_exponent(mus, values, points: int = FIT_POINTS):
    """Least-squares slope of log|value| against log mu on the last ``points`` entries."""
    x = np.log(np.asarray(mus, float))[-points:]
    y = np.log(np.abs(np.asarray(values, complex)))[-points:]
    slope, icpt = np.polyfit(x, y, 1)
    return float(slope), [float(v) for v in y - (slope * x + icpt)]


# contour differentiation -----------------------------------------------------------


def contour_derivative(f, z0: complex, order: int, radius: float, nodes: int = 16,
                       rtol: float = 1e-8, max_nodes: int = 512,
                       f_rel_noise: float = F_NOISE) -> tuple[complex, float]:
    """order-th derivative of analytic f at z0 from the Cauchy integral on |z - z0| = radius.

    Returns (value, noise), noise = order! / radius^order * f_rel_noise * max|f|
    being the size of rounding in f after amplification.  Nodes double until
    two estimates agree to ``rtol`` relative or to within the noise.
    """
    if order < 0:
        raise PreconditionError(f"order: must be >= 0, got {order}")
    cache: dict[int, complex] = {}
    gain = math.factorial(order) / radius**order

    def estimate(m):
        vals = []
        for j in range(m):
            # nested grids share nodes: index j of m equals index 2j of 2m
            key = j * (max_nodes // m)
            if key not in cache:
                cache[key] = complex(f(z0 + radius * cmath.exp(2j * math.pi * j / m)))
            vals.append(cache[key])
        vals = np.asarray(vals)
        th = 2 * np.pi * np.arange(m) / m
        noise = gain * f_rel_noise * float(np.max(np.abs(vals)))
        return complex(np.mean(vals * np.exp(-1j * order * th)) * gain), noise

    m = max(nodes, order + 2)
    m = 1 << (m - 1).bit_length()
    prev, _ = estimate(m)
    while m < max_nodes:
        m *= 2
        cur, noise = estimate(m)
        if abs(cur - prev) <= max(rtol * abs(cur), noise):
            return cur, noise
        prev = cur
    raise AccuracyError(f"contour derivative of order {order}: no convergence with {max_nodes} nodes")


# probe -------------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeConfig:
    n: int
    root_selector: tuple = (1,)
    mu_grid: tuple = (0.3, 0.2, 0.1, 0.05)
    delta: float = 0.25
    derivative_order: int | None = None
    route: str = "full"
    target_m: int | tuple | None = None
    epsilon: complex | None = None

    def __post_init__(self):
        mus = tuple(float(m) for m in self.mu_grid)
        object.__setattr__(self, "mu_grid", mus)
        object.__setattr__(self, "root_selector", tuple(int(j) for j in self.root_selector))
        if self.target_m is not None:
            ms = self.target_m if isinstance(self.target_m, (tuple, list)) else (self.target_m,)
            ms = tuple(int(m) for m in ms)
            if not ms or min(ms) < 1:
                raise PreconditionError(f"target_m: need summand indices >= 1, got {self.target_m}")
            object.__setattr__(self, "target_m", ms)
        if self.n < 1:
            raise PreconditionError(f"n: need n >= 1, got {self.n}")
        if len(mus) < 2:
            raise PreconditionError("mu_grid: need at least two values")
        if any(m <= 0 for m in mus) or any(a <= b for a, b in zip(mus, mus[1:])):
            raise PreconditionError(f"mu_grid: must be positive and strictly decreasing, got {mus}")
        if min(mus) < MIN_MU:
            raise PreconditionError(f"mu_grid: values below {MIN_MU} are out of scope")
        if not 0 < self.delta < 0.5:
            raise PreconditionError(f"delta: need 0 < delta < 1/2, got {self.delta}")
        if self.route not in ("full", "reduced"):
            raise PreconditionError(f"route: expected 'full' or 'reduced', got {self.route!r}")
        if self.route == "full" and max(self.target_m or (self.n,)) > 3:
            raise PreconditionError("n: the full route differentiates S_m for m <= 3 only")
        if self.route == "reduced" and self.n > 6:
            raise PreconditionError(f"n: the reduced route supports n <= 6, got {self.n}")


@dataclass(frozen=True)
class ProbeReport:
    fitted_exponent: float
    predicted_exponent: float
    residuals: list
    passed: bool
    inconclusive: bool = False
    epsilon: complex = 0j
    order: int = 0
    derivatives: list = field(default_factory=list)
    note: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        d["epsilon"] = [self.epsilon.real, self.epsilon.imag]
        d["derivatives"] = [[complex(v).real, complex(v).imag] for v in self.derivatives]
        return d


def _products(spec: SymbolSpec, m: int):
    """All prod_{i<=m} u_{p_i} v_{q_i} over multisets of index pairs."""
    us = [complex(u) for u, _ in spec.plus_pairs]
    vs = [complex(v) for v, _ in spec.minus_pairs]
    out = []
    for ps in itertools.combinations_with_replacement(range(len(us)), m):
        for qs in itertools.combinations_with_replacement(range(len(vs)), m):
            out.append(np.prod([us[p] for p in ps]) * np.prod([vs[q] for q in qs]))
    return out


def probe_root(spec: SymbolSpec, n: int, selector: int = 1):
    """(eps, partition pair) for the probe of S_n.

    The multiplicities come from the minimal partitions; eps is the n-th root
    of prod u_p^(-n_p) v_q^(-n_q) picked by ``selector`` (times exp(2 pi i
    selector / n)).  It must not be an m-th root, m < n, of the inverse of any
    shorter product of the u_p v_q.  For u = v = 1 this means eps is a primitive
    n-th root of unity (eps = 1 when n = 1).
    """
    part = minimal_partition_pair(spec, n)
    if isinstance(part, NonUnique):
        raise PreconditionError(f"spec: minimal partition not unique on the {part.side} side")
    us = [complex(u) for u, _ in spec.plus_pairs]
    vs = [complex(v) for v, _ in spec.minus_pairs]
    prod = np.prod([u ** c for u, c in zip(us, part.n_p)]) * np.prod([v ** c for v, c in zip(vs, part.n_q)])
    eps = complex((1 / prod) ** (1 / n) * cmath.exp(2j * math.pi * selector / n))
    for m in range(1, n):
        for p in _products(spec, m):
            if abs(eps**m * p - 1) < 1e-10:
                raise PreconditionError(
                    f"root_selector: eps = {eps:.6g} is an {m}-th root of a shorter product"
                )
    if abs(eps**n * prod - 1) > 1e-10:
        raise GeometryError("root construction lost accuracy")
    return eps, part


def _s_of_kappa(spec: SymbolSpec, ms, kappa_ref: complex, k_ref: complex):
    """kappa -> sum of S_m over m in ms, with k = sqrt(kappa) continued from (kappa_ref, k_ref)."""
    top = max(ms)

    def f(kappa):
        k = k_ref * cmath.sqrt(kappa / kappa_ref)
        terms = fredholm_terms(spec.with_k(k), top)
        return sum(terms[m - 1] for m in ms)

    return f


def probe_point(spec: SymbolSpec, m, order: int, kappa: complex) -> tuple[complex, float]:
    """order-th kappa-derivative of S_m (or of the sum over a tuple of m) at kappa
    inside the unit disc, with its noise level."""
    ms = tuple(m) if isinstance(m, (tuple, list)) else (m,)
    dist = 1 - abs(kappa)
    if dist <= 0:
        raise GeometryError(f"kappa: |kappa| = {abs(kappa)} is not inside the unit disc")
    rad = min(0.25 * dist, 0.05)
    if abs(kappa) + rad >= 1:
        raise GeometryError("derivative circle touches the unit circle")
    k_ref = cmath.sqrt(kappa)
    return contour_derivative(_s_of_kappa(spec, ms, kappa, k_ref), kappa, order, rad)


def boundary_probe(spec: SymbolSpec, cfg: ProbeConfig) -> ProbeReport:
    """Measure the blow-up exponent of d^lam S_m / d kappa^lam as kappa -> eps.

    kappa runs along eps (1 + mu)^(-1/n).  ``cfg.epsilon`` overrides the root
    construction (and its validity checks); ``cfg.target_m`` differentiates other
    summands S_m (summed when several) with the same order and path, for the
    boundedness checks.
    """
    n = cfg.n
    if cfg.epsilon is not None:
        eps, part = complex(cfg.epsilon), minimal_partition_pair(spec, n)
        note = "epsilon given explicitly"
    else:
        eps, part = probe_root(spec, n, cfg.root_selector[0])
        note = ""
    if isinstance(part, NonUnique):
        raise PreconditionError(f"spec: minimal partition not unique on the {part.side} side")
    ap = [al for _, al in spec.plus_pairs]
    aq = [al for _, al in spec.minus_pairs]
    tilt = sum(c * a for c, a in zip(part.n_p, ap)) + sum(c * a for c, a in zip(part.n_q, aq))
    order = cfg.derivative_order if cfg.derivative_order is not None else part.order
    bn = complex(tilt).real
    predicted = math.floor(bn + 1e-12) - bn - 1
    if cfg.route == "reduced":
        # the radial exponent is 2n^2 - beta n in the single-pair case and
        # sum n_p (n_p - alpha_p) + sum n_q (n_q - alpha_q) in general
        deg = sum(c * (c - a) for c, a in zip(part.n_p, ap)) + sum(c * (c - a) for c, a in zip(part.n_q, aq))
        beta_eff = (2 * n * n - complex(deg)) / n
        vals = [radial_integral(n, beta_eff, None, order, mu, cfg.delta) for mu in cfg.mu_grid]
        noisy = False
    else:
        m = cfg.target_m or (n,)
        pts = [probe_point(spec, m, order, eps * (1 + mu) ** (-1 / n)) for mu in cfg.mu_grid]
        vals = [v for v, _ in pts]
        noisy = any(e > NOISE_SHARE * abs(v) for v, e in pts)
        if noisy:
            note = "; ".join(x for x in (note, "derivative below the rounding noise") if x)
    slope, resid = fit_exponent(cfg.mu_grid, vals)
    bad = noisy or max(abs(r) for r in resid) > INCONCLUSIVE_RESIDUAL
    ok = (not bad) and abs(slope - predicted) <= PASS_TOL
    return ProbeReport(slope, predicted, resid, ok, bad, eps, order, vals, note)


def boundedness_ratio(report: ProbeReport) -> float:
    """max/min of |derivative| over the grid; small values mean no blow-up."""
    mags = np.abs(np.asarray(report.derivatives, complex))
    return float(mags.max() / mags.min())
