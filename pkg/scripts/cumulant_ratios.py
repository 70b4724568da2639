"""Exact cumulants of the multinomial Pearson statistic against its Poissonized version.

Equiprobable cells with n = 2N. Prints C_k(R), C_k(T) and their ratio; also
the variance limit sigma^2 / sigma_tilde^2 that the k=2 ratio tends to.
"""

import argparse

from sparsegof.decomposable import chi_square_cell, chi_square_profile
from sparsegof.fileio import ProbabilityVector
from sparsegof.oracle import exact_cumulants


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=lambda s: [int(v) for v in s.split(",")], default=[2, 4, 6, 8])
    ap.add_argument("--K", type=int, default=3)
    args = ap.parse_args()

    print("N,n,k,C_R,C_T,ratio,variance_limit")
    for N in args.N:
        n = 2 * N
        probs = ProbabilityVector.uniform(N, exact=True)
        R = exact_cumulants(n, probs, chi_square_cell, args.K, which="R")
        T = exact_cumulants(n, probs, chi_square_cell, args.K, which="T")
        prof = chi_square_profile(ProbabilityVector.uniform(N), n)
        limit = prof.sigma_sq / prof.sigma_tilde_sq
        for k in range(2, args.K + 1):
            r, t = R[k - 1], T[k - 1]
            print(f"{N},{n},{k},{r},{t!r},{float(r) / t!r},{limit!r}")


if __name__ == "__main__":
    main()
