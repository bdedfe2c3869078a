"""Deformed Fisher-Hartwig symbols.

A symbol is

    phi(xi) = prod_p (1 - k u_p xi)^{a_p^+} * prod_q (1 - k v_q / xi)^{a_q^-} * psi(xi),

with ``|u_p| = |v_q| = 1``, ``|k| < 1`` and ``psi = exp(sum_j c_j xi^j)`` given by
finitely many log-Laurent coefficients (``c_0 = 0``).  Every power is taken
factor by factor with the principal logarithm, so the factor
``(1 - k u xi)^a`` is cut along ``xi in (k u)^{-1} [1, inf)`` and
``(1 - k v / xi)^a`` along ``xi in k v [0, 1]``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CutProximityError, DomainError, PreconditionError
from .quadrature import QuadratureGrid, laurent_coeffs

CUT_TOL = 1e-12
UNIMODULAR_TOL = 1e-14


def plog(z):
    """Principal logarithm with arg = +pi on the whole negative real axis."""
    z = np.asarray(z, dtype=complex)
    out = np.log(z)
    neg = (z.imag == 0) & (z.real < 0)
    if np.any(neg):
        out = np.where(neg, np.log(-z.real) + 1j * np.pi, out)
    return out


def _is_integer(a: complex, tol: float = 1e-14) -> bool:
    return abs(a.imag) <= tol and abs(a.real - round(a.real)) <= tol


@dataclass(frozen=True)
class SymbolSpec:
    k: complex
    plus_pairs: tuple = ()
    minus_pairs: tuple = ()
    psi_log: tuple = ()
    annulus_s: float = 0.0
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "k", complex(self.k))
        object.__setattr__(
            self, "plus_pairs", tuple((complex(u), complex(a)) for u, a in self.plus_pairs)
        )
        object.__setattr__(
            self, "minus_pairs", tuple((complex(v), complex(a)) for v, a in self.minus_pairs)
        )
        psi = self.psi_log.items() if isinstance(self.psi_log, dict) else self.psi_log
        psi = tuple(sorted((int(j), complex(c)) for j, c in psi if complex(c) != 0))
        object.__setattr__(self, "psi_log", psi)
        if self.validate:
            self._check()

    def _check(self):
        if not abs(self.k) < 1:
            raise PreconditionError(f"k: need |k| < 1, got {self.k}")
        if not 0 <= self.annulus_s < 1:
            raise PreconditionError(f"annulus_s: need 0 <= s < 1, got {self.annulus_s}")
        if not self.plus_pairs or not self.minus_pairs:
            raise PreconditionError("plus_pairs/minus_pairs: need P, Q >= 1")
        for name, pairs in (("plus_pairs", self.plus_pairs), ("minus_pairs", self.minus_pairs)):
            for w, a in pairs:
                if abs(abs(w) - 1) > UNIMODULAR_TOL:
                    raise PreconditionError(f"{name}: point {w} is not unimodular")
                if not a.real < 1:
                    raise PreconditionError(f"{name}: need Re alpha < 1, got {a}")
                if _is_integer(a):
                    raise PreconditionError(f"{name}: alpha must not be an integer, got {a}")
        for j, _ in self.psi_log:
            if j == 0:
                raise PreconditionError("psi_log: c_0 must vanish (geometric mean one)")

    # derived accessors -------------------------------------------------

    @property
    def kappa(self) -> complex:
        return self.k * self.k

    @property
    def beta(self) -> complex:
        """Sum of all exponents; alpha_+ + alpha_- for a single pair."""
        return sum(a for _, a in self.plus_pairs) + sum(a for _, a in self.minus_pairs)

    @property
    def b(self) -> float:
        return self.beta.real

    def with_k(self, k: complex) -> "SymbolSpec":
        return SymbolSpec(k, self.plus_pairs, self.minus_pairs, self.psi_log, self.annulus_s,
                          validate=self.validate)

    # JSON -----------------------------------------------------------------

    def to_dict(self) -> dict:
        def pair(w, a):
            return {"u": [w.real, w.imag], "alpha": [a.real, a.imag]}

        return {
            "k": [self.k.real, self.k.imag],
            "plus_pairs": [pair(u, a) for u, a in self.plus_pairs],
            "minus_pairs": [pair(v, a) for v, a in self.minus_pairs],
            "psi_log": [{"j": j, "c": [c.real, c.imag]} for j, c in self.psi_log],
            "annulus_s": self.annulus_s,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "SymbolSpec":
        try:
            def pairs(key):
                return [(_cplx(p["u"]), _cplx(p["alpha"])) for p in d.get(key, [])]

            psi = [(int(e["j"]), _cplx(e["c"])) for e in d.get("psi_log", [])]
            return cls(_cplx(d["k"]), pairs("plus_pairs"), pairs("minus_pairs"), psi,
                       float(d.get("annulus_s", 0.0)))
        except (KeyError, TypeError, IndexError) as exc:
            raise PreconditionError(f"spec: malformed document ({exc!r})") from exc

    @classmethod
    def from_json(cls, text: str) -> "SymbolSpec":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "SymbolSpec":
        return cls.from_json(Path(path).read_text())


def _cplx(x) -> complex:
    if isinstance(x, (list, tuple)):
        re, im = x
        return complex(float(re), float(im))
    return complex(x)


def ising(k: complex) -> SymbolSpec:
    """sqrt((1 - k/xi) / (1 - k xi)), the diagonal-susceptibility symbol."""
    return SymbolSpec(k, [(1, -0.5)], [(1, 0.5)])


def single_pair(k, alpha_plus, alpha_minus, psi_log=(), annulus_s=0.0) -> SymbolSpec:
    return SymbolSpec(k, [(1, alpha_plus)], [(1, alpha_minus)], psi_log, annulus_s)


# evaluation -------------------------------------------------------------


def _dist_to_ray(xi, c):
    """Distance from xi to the ray c * [1, inf)."""
    w = xi / c
    d = np.where(w.real >= 1, np.abs(w.imag), np.abs(w - 1))
    return d * abs(c)


def _dist_to_segment(xi, c):
    """Distance from xi to the segment c * [0, 1]."""
    w = xi / c
    t = np.clip(w.real, 0, 1)
    return np.abs(w - t) * abs(c)


def cut_distance(spec: SymbolSpec, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=complex)
    d = np.full(xi.shape, np.inf)
    if spec.k == 0:
        return d
    for u, _ in spec.plus_pairs:
        d = np.minimum(d, _dist_to_ray(xi, 1 / (spec.k * u)))
    for v, _ in spec.minus_pairs:
        d = np.minimum(d, _dist_to_segment(xi, spec.k * v))
    return d


def _log_psi(spec: SymbolSpec, xi, sign: int = 0):
    """log psi (sign=0), its analytic-inside part (sign=+1) or outside part (sign=-1)."""
    out = np.zeros(np.shape(xi), dtype=complex)
    for j, c in spec.psi_log:
        if sign == 0 or (j > 0) == (sign > 0):
            out = out + c * xi**j
    return out


def _log_plus(spec, xi):
    out = np.zeros(np.shape(xi), dtype=complex)
    for u, a in spec.plus_pairs:
        out = out + a * plog(1 - spec.k * u * xi)
    return out


def _log_minus(spec, xi):
    out = np.zeros(np.shape(xi), dtype=complex)
    for v, a in spec.minus_pairs:
        out = out + a * plog(1 - spec.k * v / xi)
    return out


def _prepare(spec, xi, check):
    arr = np.asarray(xi, dtype=complex)
    if np.any(arr == 0):
        raise DomainError("xi: symbol is undefined at xi = 0")
    if check and np.any(cut_distance(spec, arr) < CUT_TOL):
        raise CutProximityError(f"xi: within {CUT_TOL:g} of a branch cut")
    return arr


def _out(arr, like):
    return complex(arr) if np.ndim(like) == 0 else arr


def evaluate(spec: SymbolSpec, xi, check: bool = True):
    """phi(xi), scalar or elementwise over an array."""
    arr = _prepare(spec, xi, check)
    val = np.exp(_log_plus(spec, arr) + _log_minus(spec, arr) + _log_psi(spec, arr))
    return _out(val, xi)


def fourier_coeffs(spec: SymbolSpec, j_min: int, j_max: int,
                   grid: QuadratureGrid | None = None) -> np.ndarray:
    """phi_j for j_min <= j <= j_max, by the trapezoid rule on the unit circle."""
    grid = grid or QuadratureGrid(1.0, 64)
    if abs(grid.radius - 1) > 1e-15:
        raise PreconditionError(f"grid.radius: Fourier coefficients need radius 1, got {grid.radius}")
    return laurent_coeffs(lambda x: evaluate(spec, x, check=False), j_min, j_max, 1.0,
                          min_nodes=grid.nodes_per_dim)


class Factorization:
    """Wiener-Hopf split phi = phi_+ phi_- and the ratio Lambda = phi_- / phi_+.

    Coefficient arrays are cached per (length, radius); instances are otherwise
    immutable.
    """

    def __init__(self, spec: SymbolSpec, radius: float | None = None):
        self.spec = spec
        self.radius = (abs(spec.k) + 1) / 2 if radius is None else float(radius)
        lo = max(abs(spec.k), spec.annulus_s)
        if not lo < self.radius < 1:
            raise PreconditionError(f"radius: need {lo} < r < 1, got {self.radius}")
        self._cache: dict = {}

    @property
    def kappa(self) -> complex:
        return self.spec.kappa

    def phi_plus(self, xi):
        arr = np.asarray(xi, dtype=complex)
        return _out(np.exp(_log_plus(self.spec, arr) + _log_psi(self.spec, arr, +1)), xi)

    def phi_minus(self, xi):
        arr = _prepare(self.spec, xi, False)
        return _out(np.exp(_log_minus(self.spec, arr) + _log_psi(self.spec, arr, -1)), xi)

    def log_lambda(self, xi):
        arr = _prepare(self.spec, xi, False)
        s = self.spec
        return _log_minus(s, arr) - _log_plus(s, arr) + _log_psi(s, arr, -1) - _log_psi(s, arr, +1)

    def lambda_fn(self, xi):
        return _out(np.exp(self.log_lambda(xi)), xi)

    def rho_fn(self, xi):
        arr = _prepare(self.spec, xi, False)
        return _out(np.exp(_log_psi(self.spec, arr, -1) - _log_psi(self.spec, arr, +1)), xi)

    # coefficients ---------------------------------------------------------

    def _du(self, x):
        # density of the measure u in x = 1/xi: Lambda(1/x)
        return np.exp(self.log_lambda(1 / x))

    def _dv(self, y):
        return np.exp(-self.log_lambda(y))

    def lambda_coeffs(self, j_min: int, j_max: int, radius: float | None = None) -> np.ndarray:
        """Lambda_j, computed as moments int x^j du(x) on |x| = radius."""
        return self._moments("u", j_min, j_max, radius)

    def lambda_inv_tilde_coeffs(self, j_min: int, j_max: int,
                                radius: float | None = None) -> np.ndarray:
        """Coefficients of xi -> 1/Lambda(1/xi), as moments int y^j dv(y)."""
        return self._moments("v", j_min, j_max, radius)

    def _moments(self, which, j_min, j_max, radius):
        r = self.radius if radius is None else radius
        key = (which, j_min, j_max, r)
        if key not in self._cache:
            g = self._du if which == "u" else self._dv
            # moment j is the Laurent coefficient at index -j
            c = laurent_coeffs(g, -j_max, -j_min, r)
            self._cache[key] = c[::-1].copy()
        return self._cache[key]

    def moment_arrays(self, length: int, radius: float | None = None):
        """(Lambda_m, (Lambda~^-1)_m) for m = 0..length, sharing one cache entry."""
        return (self.lambda_coeffs(0, length, radius),
                self.lambda_inv_tilde_coeffs(0, length, radius))

    def cauchy_bound(self, radius: float | None = None, nodes: int = 1024) -> float:
        """C with |Lambda_m|, |(Lambda~^-1)_m| <= C r^m for m >= 0 (sampled max modulus)."""
        r = self.radius if radius is None else radius
        x = r * np.exp(2j * np.pi * np.arange(nodes) / nodes)
        # sampled maximum; pad by the next-node variation to stay on the safe side
        m = max(np.max(np.abs(self._du(x))), np.max(np.abs(self._dv(x))))
        return float(m) * 1.01


def factorize(spec: SymbolSpec, radius: float | None = None) -> Factorization:
    if spec.annulus_s > 0 and not abs(spec.k) > spec.annulus_s:
        raise PreconditionError(
            f"k: need |k| > annulus_s = {spec.annulus_s} for the factor split, got {spec.k}"
        )
    return Factorization(spec, radius)


def e_of_phi(spec: SymbolSpec) -> complex:
    """Strong Szego limit E(phi) = lim D_N(phi)."""
    k = spec.k
    log_e = 0j
    for u, ap in spec.plus_pairs:
        for v, am in spec.minus_pairs:
            log_e += -ap * am * complex(plog(1 - k * k * u * v))
    c = dict(spec.psi_log)
    jmax = max((abs(j) for j in c), default=0)
    for j in range(1, jmax + 1):
        lp = c.get(j, 0) - sum(a * (k * u) ** j for u, a in spec.plus_pairs) / j
        lm = c.get(-j, 0) - sum(a * (k * v) ** j for v, a in spec.minus_pairs) / j
        fh = sum(a * (k * u) ** j for u, a in spec.plus_pairs) / j
        fh_m = sum(a * (k * v) ** j for v, a in spec.minus_pairs) / j
        # j L_j L_-j minus the pure Fisher-Hartwig product already summed in closed form
        log_e += j * (lp * lm - fh * fh_m)
    return complex(np.exp(log_e))
