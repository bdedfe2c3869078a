"""chi(k) from Toeplitz determinants against E(phi) S(k) from Fredholm determinants."""
import argparse

from toeplitz_boundary.series import chi, s_series
from toeplitz_boundary.symbol import e_of_phi, ising
from toeplitz_boundary.toeplitz import fredholm_terms


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ks", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8")
    ap.add_argument("--tol", type=float, default=1e-12)
    args = ap.parse_args()
    print(f"{'k':>5} {'chi':>24} {'|chi - E S|':>12} {'terms':>6} {'S_1':>12} {'S_2':>12}")
    for k in (float(x) for x in args.ks.split(",")):
        spec = ising(k)
        c = chi(spec, args.tol)
        s = s_series(spec, args.tol)
        s1, s2 = fredholm_terms(spec, 2)
        gap = abs(c.value - e_of_phi(spec) * s.value)
        print(f"{k:5.2f} {c.value.real:24.16e} {gap:12.2e} {c.terms_used:6d} {abs(s1):12.3e} {abs(s2):12.3e}")


if __name__ == "__main__":
    main()
