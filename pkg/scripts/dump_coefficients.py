"""Write the scaled Poisson central-moment coefficients as CSV (nu,l,numerator,denominator)."""

import argparse
import sys

from sparsegof.poisson_moments import write_coefficients_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-order", type=int, default=20)
    ap.add_argument("--out", default=None, help="default: stdout")
    args = ap.parse_args()
    orders = range(2, args.max_order + 1)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_coefficients_csv(fh, orders)
    else:
        write_coefficients_csv(sys.stdout, orders)


if __name__ == "__main__":
    main()
