"""Toeplitz determinants, Hankel finite sections and the Fredholm side of the
Geronimo-Case / Borodin-Okounkov identity

    D_N(phi) = E(phi) det(I - H_N(Lambda) H_N(Lambda~^-1)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz as _toeplitz_matrix

from .errors import PreconditionError, TruncationError
from .quadrature import next_pow2
from .symbol import Factorization, SymbolSpec, e_of_phi, factorize, fourier_coeffs

M_CAP = 4096
AUTO_TARGET = 1e-14


def logdet(a: np.ndarray) -> complex:
    """log det(a) = log|det| + i arg(det), from a pivoted LU factorization."""
    sign, logabs = np.linalg.slogdet(a)
    if sign == 0:
        return complex(-np.inf)
    return complex(logabs) + 1j * complex(np.angle(sign))


def det(a: np.ndarray) -> complex:
    if a.shape[0] == 0:
        return 1 + 0j
    ld = logdet(a)
    return 0j if ld.real == -np.inf else complex(np.exp(ld))


def toeplitz_matrix(coeffs: np.ndarray, N: int) -> np.ndarray:
    """(phi_{i-j})_{0<=i,j<N} from coeffs indexed so that coeffs[j + N - 1] = phi_j."""
    mid = N - 1
    col = coeffs[mid:mid + N]
    row = coeffs[mid::-1][:N]
    return _toeplitz_matrix(col, row)


def toeplitz_det(spec: SymbolSpec, N: int, coeffs: np.ndarray | None = None) -> complex:
    """D_N(phi) = det(phi_{i-j})_{1<=i,j<=N}.

    ``coeffs`` may carry precomputed phi_j for |j| <= C with C >= N - 1, indexed
    from -C.
    """
    if N < 1:
        raise PreconditionError(f"N: need N >= 1, got {N}")
    if coeffs is None:
        coeffs = fourier_coeffs(spec, -(N - 1), N - 1)
    else:
        c = (len(coeffs) - 1) // 2
        coeffs = coeffs[c - (N - 1):c + N]
    return det(toeplitz_matrix(coeffs, N))


@dataclass(frozen=True)
class OperatorTruncation:
    N: int
    M: int
    H_u: np.ndarray
    H_v: np.ndarray
    tail_bound: float

    def K(self) -> np.ndarray:
        return self.H_u @ self.H_v


def hankel(moments: np.ndarray, N: int, M: int) -> np.ndarray:
    """M x M matrix with entries moments[N + i + j + 1]; missing entries are zero."""
    idx = N + 1 + np.add.outer(np.arange(M), np.arange(M))
    out = np.zeros((M, M), dtype=complex)
    ok = idx < len(moments)
    out[ok] = moments[idx[ok]]
    return out


def _trivial(fact: Factorization) -> bool:
    s = fact.spec
    return s.k == 0 and not s.psi_log


def auto_size(C: float, r: float, N: int, target: float = AUTO_TARGET) -> int:
    """Smallest M >= 1 with C r^(N+M) < target."""
    need = math.log(target / C) / math.log(r) - N
    M = max(1, math.floor(need) + 1)
    if M > M_CAP:
        raise TruncationError(f"M: automatic section size {M} exceeds cap {M_CAP}")
    return M


def tail_bound(C: float, r: float, N: int, M: int, hs_u: float | None = None,
               hs_v: float | None = None) -> float:
    """Bound on |det(I - K_N) - det(I - K_N^(M))| from Hilbert-Schmidt tails.

    Both moment sequences satisfy |c_m| <= C r^m, so the complement of the
    M x M section has HS norm <= sqrt(2) C r^(N+M+1) / (1 - r^2).  ``hs_u`` and
    ``hs_v`` are the HS norms of the sections themselves (defaulting to the
    same a-priori bound for the whole operator).  Uses
    |det(I-A) - det(I-B)| <= |A-B|_1 exp(1 + |A|_1 + |B|_1).
    """
    tail = math.sqrt(2) * C * r ** (N + M + 1) / (1 - r * r)
    prior = C * r ** (N + 1) / (1 - r * r)
    fu = prior if hs_u is None else hs_u + tail
    fv = prior if hs_v is None else hs_v + tail
    trace_gap = fu * tail + tail * fv
    expo = 1 + 2 * fu * fv
    if expo > 700:
        return math.inf
    return trace_gap * math.exp(expo)


def build_truncation(fact: Factorization, N: int, M: int | str = "auto") -> OperatorTruncation:
    if N < 1:
        raise PreconditionError(f"N: need N >= 1, got {N}")
    if _trivial(fact):
        m = 1 if M == "auto" else int(M)
        z = np.zeros((m, m), dtype=complex)
        return OperatorTruncation(N, m, z, z.copy(), 0.0)
    r = fact.radius
    C = fact.cauchy_bound()
    if M == "auto":
        M = auto_size(C, r, N)
    M = int(M)
    if M < 1:
        raise PreconditionError(f"M: need M >= 1, got {M}")
    if M > M_CAP:
        raise TruncationError(f"M: section size {M} exceeds cap {M_CAP}")
    length = next_pow2(N + 2 * M + 1)
    u, v = fact.moment_arrays(length)
    Hu, Hv = hankel(u, N, M), hankel(v, N, M)
    bound = tail_bound(C, r, N, M, float(np.linalg.norm(Hu)), float(np.linalg.norm(Hv)))
    return OperatorTruncation(N, M, Hu, Hv, bound)


def fredholm_det(tr: OperatorTruncation) -> complex:
    """det(I - H_u H_v) on the M x M section."""
    if not np.any(tr.H_u) or not np.any(tr.H_v):
        return 1 + 0j
    return det(np.eye(tr.M) - tr.K())


def gcbo_residual(spec: SymbolSpec, N: int, fact: Factorization | None = None) -> float:
    """|D_N - E det(I - K_N)| / max(1, |D_N|)."""
    d = toeplitz_det(spec, N)
    fact = fact or factorize(spec)
    rhs = e_of_phi(spec) * fredholm_det(build_truncation(fact, N))
    return abs(d - rhs) / max(1.0, abs(d))


# all N at once ------------------------------------------------------------


def moment_length(fact: Factorization, tol: float = 1e-18) -> int:
    """L such that both moment sequences are below ``tol`` beyond index L."""
    if _trivial(fact):
        return 1
    k = abs(fact.spec.k)
    # Cauchy estimate on a circle hugging the singular radius |k|
    r = max(k + (1 - k) / 8, fact.spec.annulus_s + (1 - fact.spec.annulus_s) / 8)
    C = fact.cauchy_bound(radius=r)
    return max(8, int(math.ceil(math.log(tol / C) / math.log(r))))


def hankel_product(fact: Factorization, L: int | None = None) -> np.ndarray:
    """G with K_N = G[N:, N:] for every N >= 0 (moments truncated at index L).

    K_N(p, q) = sum_m u_{N+p+m+1} v_{m+q+N+1}, so all K_N are trailing principal
    blocks of G = H_0(u) H_0(v).
    """
    L = L or moment_length(fact)
    u, v = fact.moment_arrays(next_pow2(L + 1))
    Hu = hankel(u[:L + 1], 0, L)
    Hv = hankel(v[:L + 1], 0, L)
    return Hu @ Hv


def trailing_power_sums(G: np.ndarray, order: int) -> list[np.ndarray]:
    """[p_1, ..., p_order] with p_j[N] = tr(G[N:, N:]^j), N = 0..L-1 (p_j[L] = 0)."""
    if not 1 <= order <= 3:
        raise PreconditionError(f"order: supported 1..3, got {order}")
    L = G.shape[0]
    d = np.diag(G)
    p1 = np.zeros(L + 1, dtype=complex)
    p1[:L] = np.cumsum(d[::-1])[::-1]
    out = [p1]
    if order >= 2:
        P = G * G.T
        row = np.triu(P, 1).sum(axis=1)
        p2 = np.zeros(L + 1, dtype=complex)
        p2[:L] = np.cumsum((np.diag(P) + 2 * row)[::-1])[::-1]
        out.append(p2)
    if order >= 3:
        p3 = np.zeros(L + 1, dtype=complex)
        acc = 0j
        for n in range(L - 1, -1, -1):
            g = G[n, n]
            r = G[n, n + 1:]
            c = G[n + 1:, n]
            acc += g**3 + 3 * g * (r @ c) + 3 * (r @ (G[n + 1:, n + 1:] @ c))
            p3[n] = acc
        out.append(p3)
    return out


def elementary_from_power(p: list[np.ndarray], n: int) -> np.ndarray:
    """Elementary symmetric function e_n from power sums (Newton's identities)."""
    if n == 1:
        return p[0]
    if n == 2:
        return (p[0] ** 2 - p[1]) / 2
    if n == 3:
        return (p[0] ** 3 - 3 * p[0] * p[1] + 2 * p[2]) / 6
    raise PreconditionError(f"n: supported 1..3, got {n}")


def fredholm_terms(spec: SymbolSpec, n_max: int, fact: Factorization | None = None,
                   L: int | None = None) -> list[complex]:
    """[S_1, ..., S_{n_max}] with S_n = (-1)^n sum_{N>=1} e_n(K_N).

    This is the series side of the multiple-integral expansion: the n-th
    Fredholm coefficient of det(I - K_N), summed over N.
    """
    fact = fact or factorize(spec)
    if _trivial(fact):
        return [0j] * n_max
    if n_max == 1:
        # sum_N tr K_N = sum_m m(m-1)/2 u_m v_m: no matrix needed
        L = L or moment_length(fact)
        u, v = fact.moment_arrays(next_pow2(L + 1))
        m = np.arange(L + 1)
        return [complex(-np.sum(m * (m - 1) / 2 * u[:L + 1] * v[:L + 1]))]
    G = hankel_product(fact, L)
    p = trailing_power_sums(G, n_max)
    return [complex((-1) ** n * np.sum(elementary_from_power(p, n)[1:])) for n in range(1, n_max + 1)]
