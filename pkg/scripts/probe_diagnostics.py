"""Full-route probe runs near the unit circle, with the raw derivative tables.

Shows where the kappa-derivatives of S_1 and S_2 of the Ising symbol blow up and
at what rate, including the configurations that come out inconclusive.
"""
import argparse
import cmath
import math

import numpy as np

from toeplitz_boundary.asymptotics import (
    ProbeConfig, boundary_probe, boundedness_ratio, fit_exponent, probe_point,
)
from toeplitz_boundary.symbol import ising


def show(title, rep):
    print(f"{title}: fitted {rep.fitted_exponent:+.3f}, predicted {rep.predicted_exponent:+.3f}, "
          f"inconclusive={rep.inconclusive}, ratio={boundedness_ratio(rep):.3g} {rep.note}")
    for d in rep.derivatives:
        print(f"    |d| = {abs(d):.6e}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=float, default=0.5, help="only fixes the branch of k = sqrt(kappa)")
    ap.add_argument("--slow", action="store_true", help="also run the S_2 + S_3 and n = 2 order-8 probes")
    args = ap.parse_args()
    spec = ising(args.k)
    grid = (0.3, 0.2, 0.1, 0.05)

    show("S_1, eps = -1, order 2", boundary_probe(spec, ProbeConfig(1, mu_grid=grid, epsilon=-1)))
    show("S_1, eps = 1, order 2", boundary_probe(spec, ProbeConfig(1, mu_grid=grid)))
    eps = cmath.exp(2j * math.pi / 3)
    show("S_2, eps = exp(2 pi i/3), order 2",
         boundary_probe(spec, ProbeConfig(1, mu_grid=grid, epsilon=eps, target_m=2)))

    mus = np.array([0.1, 0.07, 0.05, 0.035, 0.025])
    print("S_1 and its kappa-derivatives along kappa = 1/(1 + mu):")
    for order in range(3):
        vals = [probe_point(spec, 1, order, 1 / (1 + m))[0] for m in mus]
        print(f"    order {order}: slope {fit_exponent(mus, vals, len(mus))[0]:+.3f}")

    if args.slow:
        # the next two summands together, toward the same eps (minutes)
        show("S_2 + S_3, eps = exp(2 pi i/3), order 2",
             boundary_probe(spec, ProbeConfig(1, mu_grid=grid, epsilon=eps, target_m=(2, 3))))
        show("S_2, eps = -1, order 8",
             boundary_probe(spec, ProbeConfig(2, mu_grid=grid, epsilon=-1)))


if __name__ == "__main__":
    main()
