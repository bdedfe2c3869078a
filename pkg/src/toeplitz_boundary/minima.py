"""Minimizing sum_i n_i (n_i - a_i) over compositions n_1 + ... + n_k = n.

Two routes: exhaustive enumeration, and a nearest-lattice-point search based on

    sum n_i (n_i - a_i) = sum (nbar_i - abar_i)^2 + k (n/k - s/2)^2 - sum a_i^2 / 4

with s = mean(a), abar_i = (a_i - s)/2 and nbar_i = n_i - n/k.  The nbar range
over the coset (Z - n/k)^k cut by sum = 0, so for large n the minimizers are the
lattice points closest to abar.

Exponents given as ``fractions.Fraction`` are handled in exact arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np

from .errors import NumericalError, PreconditionError, SizeError
from .symbol import SymbolSpec

ENUM_LIMIT = 10**7
TIE_TOL = 1e-12
IDENTITY_TOL = 1e-10


@dataclass(frozen=True)
class MinProblem:
    a: tuple
    n: int

    def __post_init__(self):
        a = tuple(x if isinstance(x, Fraction) else float(x) for x in self.a)
        if not a:
            raise PreconditionError("a: need at least one exponent (k >= 1)")
        if any(isinstance(x, float) and not math.isfinite(x) for x in a):
            raise PreconditionError(f"a: entries must be finite, got {a}")
        if int(self.n) != self.n or self.n < 0:
            raise PreconditionError(f"n: need a nonnegative integer, got {self.n}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "n", int(self.n))

    @property
    def k(self) -> int:
        return len(self.a)

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Fraction) for x in self.a)


@dataclass(frozen=True)
class MinimaResult:
    value: Real
    minimizers: tuple
    unique: bool
    via: str


def parse_exponent(text: str) -> Fraction | float:
    """'0.3' -> 0.3, '3/10' -> Fraction(3, 10), '2' -> Fraction(2)."""
    text = text.strip()
    try:
        if "/" in text or text.lstrip("+-").isdigit():
            return Fraction(text)
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise PreconditionError(f"a: cannot parse exponent {text!r}") from exc


def objective(a, comp) -> Real:
    return sum(ni * (ni - ai) for ni, ai in zip(comp, a))


def identity_rhs(a, comp) -> Real:
    """The completed-square form of ``objective``."""
    k, n = len(a), sum(comp)
    exact = all(isinstance(x, Fraction) for x in a)
    one = Fraction(1) if exact else 1.0
    s = sum(a) * one / k
    abar = [(ai - s) / 2 for ai in a]
    nbar = [ni - n * one / k for ni in comp]
    return (sum((x - y) ** 2 for x, y in zip(nbar, abar))
            + k * (n * one / k - s / 2) ** 2 - sum(ai * ai for ai in a) / 4)


def _collect(a, candidates, exact: bool):
    scored = [(objective(a, c), c) for c in candidates]
    best = min(v for v, _ in scored)
    if exact:
        ties = [c for v, c in scored if v == best]
    else:
        tol = TIE_TOL * max(1.0, abs(best))
        ties = [c for v, c in scored if v - best <= tol]
    return best, tuple(sorted(set(ties)))


def compositions(n: int, k: int):
    """All (n_1, ..., n_k) with n_i >= 0 summing to n, lexicographic order."""
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


def min_bruteforce(p: MinProblem) -> MinimaResult:
    count = math.comb(p.n + p.k - 1, p.k - 1)
    if count > ENUM_LIMIT:
        raise SizeError(f"n, k: {count} compositions exceed the enumeration limit {ENUM_LIMIT}")
    value, mins = _collect(p.a, compositions(p.n, p.k), p.exact)
    return MinimaResult(value, mins, len(mins) == 1, "enumeration")


def _ball_points(target, n: int, radius: float):
    """Integer vectors with sum n and |m - target| <= radius (target sums to n).

    Depth-first over the first k - 1 coordinates with the partial distance as a
    bound; the last coordinate is fixed by the sum.
    """
    k = len(target)
    r2 = radius * radius
    out = []

    def rec(prefix, acc, dist2):
        i = len(prefix)
        if i == k - 1:
            last = n - acc
            d = dist2 + (last - target[-1]) ** 2
            if d <= r2:
                out.append(tuple(prefix) + (last,))
            return
        t = target[i]
        room = math.sqrt(max(r2 - dist2, 0.0))
        for m in range(math.ceil(t - room), math.floor(t + room) + 1):
            rec(prefix + [m], acc + m, dist2 + (m - t) ** 2)

    rec([], 0, 0.0)
    return out


def min_lattice(p: MinProblem) -> MinimaResult:
    """Closest points of the shifted lattice to abar; enumeration when n is too small.

    If any lattice candidate has a negative part (the constraint nbar_i >= -n/k
    is active) the problem is handed to ``min_bruteforce`` instead.
    """
    k, n, a = p.k, p.n, p.a
    af = [float(x) for x in a]
    s = sum(af) / k
    abar = [(x - s) / 2 for x in af]
    # back in n-coordinates the ball centre is abar + n/k
    target = [x + n / k for x in abar]
    radius = math.sqrt(k) + max(abs(x) for x in abar)
    pts = _ball_points(target, n, radius)
    if not pts:
        raise NumericalError("min_lattice: empty search ball")
    value, mins = _collect(a, pts, p.exact)
    if any(min(c) < 0 for c in mins):
        r = min_bruteforce(p)
        return MinimaResult(r.value, r.minimizers, r.unique, "enumeration")
    for c in mins:
        gap = objective(a, c) - identity_rhs(a, c)
        if abs(gap) > IDENTITY_TOL * max(1.0, abs(float(value))):
            raise NumericalError(f"completed-square identity off by {float(gap):g} at {c}")
    return MinimaResult(value, mins, len(mins) == 1, "lattice")


def _in_class(x, base: int, mod: int) -> bool:
    """x in mod*Z + base, tested exactly for Fractions and to 1e-10 otherwise."""
    q = (x - base) / mod
    if isinstance(q, Fraction):
        return q.denominator == 1
    return abs(q - round(q)) <= 1e-10


def k2_nonunique(a, n: int) -> bool:
    """Closed form for k = 2: ties iff (n even, a1 - a2 in 4Z + 2) or (n odd, a1 - a2 in 4Z)."""
    d = a[0] - a[1]
    return _in_class(d, 2, 4) if n % 2 == 0 else _in_class(d, 0, 4)


def uniqueness_class(p: MinProblem) -> tuple[bool, int]:
    """(minimizer unique?, n mod k)."""
    r = min_lattice(p)
    if p.k == 2 and r.via == "lattice" and r.unique == k2_nonunique(p.a, p.n):
        raise NumericalError(
            f"k=2 closed form disagrees with the lattice search at a={p.a}, n={p.n}"
        )
    return r.unique, p.n % p.k


@dataclass(frozen=True)
class PartitionPair:
    n_p: tuple
    n_q: tuple
    order: int
    unique: bool = True


@dataclass(frozen=True)
class NonUnique:
    side: str
    minimizers: tuple
    unique: bool = False


def minimal_partition_pair(spec: SymbolSpec, n: int) -> PartitionPair | NonUnique:
    """Minimal compositions for the plus and minus exponents and the derivative order

        lambda = sum n_p^2 + sum n_q^2 - floor(sum n_p a_p + sum n_q a_q)

    with a = Re alpha.  A tie on either side is reported, not resolved.
    """
    if n < 1:
        raise PreconditionError(f"n: need n >= 1, got {n}")
    ap = tuple(float(al.real) for _, al in spec.plus_pairs)
    aq = tuple(float(al.real) for _, al in spec.minus_pairs)
    rp = min_lattice(MinProblem(ap, n))
    if not rp.unique:
        return NonUnique("plus", rp.minimizers)
    rq = min_lattice(MinProblem(aq, n))
    if not rq.unique:
        return NonUnique("minus", rq.minimizers)
    n_p, n_q = rp.minimizers[0], rq.minimizers[0]
    tilt = sum(x * y for x, y in zip(n_p, ap)) + sum(x * y for x, y in zip(n_q, aq))
    order = sum(x * x for x in n_p) + sum(x * x for x in n_q) - math.floor(tilt + 1e-12)
    return PartitionPair(n_p, n_q, int(order))


def growth_coefficient(a, ns) -> float:
    """Leading coefficient of a quadratic fit of M_n over the n in ``ns`` congruent
    to ns[0] mod k.

    Within one residue class the nearest-point distance, and with it the O(1)
    remainder of M_n = n^2/k - s n + O(1), is constant once n is large.
    """
    k = len(a)
    ns = [n for n in ns if (n - ns[0]) % k == 0]
    if len(ns) < 3:
        raise PreconditionError(f"ns: need >= 3 values in one residue class, got {len(ns)}")
    vals = [float(min_lattice(MinProblem(a, n)).value) for n in ns]
    return float(np.polyfit(np.asarray(ns, float), vals, 2)[0])


__all__ = [
    "MinProblem", "MinimaResult", "PartitionPair", "NonUnique", "parse_exponent",
    "objective", "identity_rhs", "compositions", "min_bruteforce", "min_lattice",
    "k2_nonunique", "uniqueness_class", "minimal_partition_pair", "growth_coefficient",
]
