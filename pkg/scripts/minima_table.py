"""Minimal compositions for a list of exponents over a range of n."""
import argparse

from toeplitz_boundary.minima import MinProblem, k2_nonunique, min_lattice, parse_exponent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", default="2,0", help="comma list; decimals or p/q")
    ap.add_argument("--n-max", type=int, default=20)
    args = ap.parse_args()
    a = tuple(parse_exponent(x) for x in args.a.split(","))
    print(f"{'n':>3} {'M_n':>10} {'unique':>6} {'via':>11}  minimizers")
    for n in range(1, args.n_max + 1):
        r = min_lattice(MinProblem(a, n))
        extra = ""
        if len(a) == 2:
            extra = f"  (closed form: {'tie' if k2_nonunique(a, n) else 'unique'})"
        mins = " ".join(str(c) for c in r.minimizers)
        print(f"{n:3d} {float(r.value):10.4f} {str(r.unique):>6} {r.via:>11}  {mins}{extra}")


if __name__ == "__main__":
    main()
