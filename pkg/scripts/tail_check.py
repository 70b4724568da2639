"""Desk-scale check of the normal tail against simulation.

Defaults reproduce the two acceptance runs: Pearson with N=200, n=1000 and
LR with N=200, n=2000, one million replications each.
"""

import argparse
import sys

from sparsegof.fileio import ProbabilityVector
from sparsegof.montecarlo import SimulationConfig, estimate_tail, write_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--centering", choices=["N", "N-1"], default="N")
    args = ap.parse_args()

    runs = [("chi2", 200, 1000, (1.0, 1.5, 2.0)), ("lr", 200, 2000, (1.0, 1.5))]
    results = []
    for kind, N, n, grid in runs:
        cfg = SimulationConfig(n=n, probs=ProbabilityVector.uniform(N), kind=kind, replications=args.reps,
                               x_grid=grid, seed=args.seed, partitions=args.threads,
                               centering=args.centering)
        res = estimate_tail(cfg)
        print(f"# {kind}: {res.elapsed:.1f}s", file=sys.stderr)
        results.append(res)
    write_csv(results, sys.stdout)


if __name__ == "__main__":
    main()
