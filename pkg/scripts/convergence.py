"""Ratio of simulated to normal tail as N grows at a fixed mean cell count."""

import argparse
import sys

from sparsegof.fileio import ProbabilityVector
from sparsegof.montecarlo import SimulationConfig, convergence_study, write_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--stat", choices=["chi2", "lr"], default="chi2")
    ap.add_argument("--lambda", dest="lam", type=float, default=None,
                    help="mean cell count (default 5 for chi2, 10 for lr)")
    ap.add_argument("--N", type=lambda s: [int(v) for v in s.split(",")], default=[50, 100, 200, 400])
    ap.add_argument("--x", type=lambda s: [float(v) for v in s.split(",")], default=[1.5])
    ap.add_argument("--reps", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    lam = args.lam if args.lam is not None else (5.0 if args.stat == "chi2" else 10.0)

    base = SimulationConfig(n=1, probs=ProbabilityVector.uniform(1), kind=args.stat,
                            replications=args.reps, x_grid=args.x, seed=args.seed, partitions=args.threads)
    write_csv(convergence_study(base, args.N, lam), sys.stdout)


if __name__ == "__main__":
    main()
