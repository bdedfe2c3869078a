"""Equispaced trapezoid rules on circles, with node doubling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, PreconditionError

NODE_CAP = 1 << 20


@dataclass(frozen=True)
class QuadratureGrid:
    """Circle of nodes used for spectral evaluation of contour integrals.

    ``nodes_per_dim`` is the starting node count; routines that certify their
    result double it until successive answers agree.
    """

    radius: float = 1.0
    nodes_per_dim: int = 64
    layout: str = "equispaced"

    def __post_init__(self):
        if not self.radius > 0:
            raise PreconditionError(f"radius must be positive, got {self.radius}")
        n = self.nodes_per_dim
        if n < 4 or n & (n - 1):
            raise PreconditionError(f"nodes_per_dim must be a power of two >= 4, got {n}")
        if self.layout != "equispaced":
            raise PreconditionError(f"unsupported layout {self.layout!r}")

    def nodes(self, count: int | None = None) -> np.ndarray:
        m = self.nodes_per_dim if count is None else count
        return self.radius * np.exp(2j * np.pi * np.arange(m) / m)


def next_pow2(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


def laurent_once(g, j_min: int, j_max: int, radius: float, nodes: int) -> np.ndarray:
    """Trapezoid estimate of the Laurent coefficients j_min..j_max of ``g``.

    ``g`` must accept an array of points on ``|x| = radius``.
    """
    x = radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    spectrum = np.fft.fft(g(x)) / nodes
    j = np.arange(j_min, j_max + 1)
    # c_j = r^-j * (1/M) sum g(x_m) w^{-jm}; evaluate r^-j in log form to avoid overflow
    return spectrum[j % nodes] * np.exp(-j * np.log(radius))


def laurent_coeffs(
    g,
    j_min: int,
    j_max: int,
    radius: float = 1.0,
    *,
    min_nodes: int = 64,
    tol: float = 1e-12,
    cap: int = NODE_CAP,
) -> np.ndarray:
    """Laurent coefficients of ``g`` on a circle, certified by node doubling.

    The node count starts at the smallest power of two that is at least
    ``4 * (j_max - j_min)`` and ``min_nodes``; it is doubled until two
    successive estimates agree to ``tol`` (absolute, relative to ``max(1, |c|)``).
    """
    if j_max < j_min:
        raise PreconditionError("j_max must be >= j_min")
    span = max(j_max - j_min, abs(j_min), abs(j_max), 1)
    m = next_pow2(max(min_nodes, 4 * span))
    prev = laurent_once(g, j_min, j_max, radius, m)
    while True:
        m *= 2
        if m > cap:
            raise AccuracyError(
                f"Laurent coefficients did not converge to {tol:g} with {cap} nodes"
            )
        cur = laurent_once(g, j_min, j_max, radius, m)
        scale = max(1.0, float(np.max(np.abs(cur))))
        if np.max(np.abs(cur - prev)) <= tol * scale:
            return cur
        prev = cur
