"""Residual table |D_N - E det(I - K_N)| / max(1, |D_N|) for two symbols."""
import argparse

import numpy as np

from toeplitz_boundary.symbol import SymbolSpec, ising
from toeplitz_boundary.toeplitz import gcbo_residual


def two_pair(k):
    return SymbolSpec(k, [(1, 0.3), (1j, -0.2)], [(1, 0.25), (-1j, 0.1)])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N-max", type=int, default=8)
    ap.add_argument("--ks", default="0.1,0.3,0.5,0.7")
    args = ap.parse_args()
    ks = [float(k) for k in args.ks.split(",")]
    for name, make in (("ising", ising), ("two_pair", two_pair)):
        print(f"{name}: rows N, columns k = {ks}")
        for N in range(1, args.N_max + 1):
            res = [gcbo_residual(make(k), N) for k in ks]
            print(f"  N={N:2d} " + " ".join(f"{r:9.2e}" for r in res))
        print(f"  worst {np.max([gcbo_residual(make(k), N) for k in ks for N in range(1, args.N_max + 1)]):.2e}")


if __name__ == "__main__":
    main()
