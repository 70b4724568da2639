"""Seeded multinomial simulation of the Pearson and LR tail probabilities.

Replications are cut into fixed-size blocks. Block ``b`` draws from a Philox
stream keyed by ``SeedSequence(seed, spawn_key=(b,))``, so every block is
reproducible on its own and the result does not depend on how blocks are
spread over worker threads. Exceedance counts are integers and are reduced
in block order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numpy as np

from . import decomposable
from .errors import BudgetError, RangeError
from .fileio import ProbabilityVector, as_probs, jsonable
from .tail import normal_tail

MIN_REPLICATIONS = 1000
DEFAULT_BUDGET = 10**8
DEFAULT_BLOCK = 1 << 14
WILSON_Z = 1.959963984540054

CSV_COLUMNS = ["kind", "N", "n", "x", "p_theory", "p_hat", "se", "wilson_lo", "wilson_hi",
               "ratio", "reps", "seed"]


@dataclass
class SimulationConfig:
    n: int
    probs: ProbabilityVector
    kind: str = "chi2"
    replications: int = 100_000
    x_grid: Sequence[float] = (1.0,)
    seed: int = 0
    partitions: int = 1
    centering: str = "N"
    budget: int = DEFAULT_BUDGET
    block_size: int = DEFAULT_BLOCK

    def __post_init__(self):
        self.probs = as_probs(self.probs)
        self.kind = decomposable.normalize_kind(self.kind)
        self.x_grid = tuple(float(x) for x in self.x_grid)
        if self.replications < MIN_REPLICATIONS:
            raise RangeError(f"need at least {MIN_REPLICATIONS} replications, got {self.replications}")
        if not self.x_grid or any(x < 0 for x in self.x_grid):
            raise RangeError("x grid must be a non-empty list of non-negative values")
        if list(self.x_grid) != sorted(self.x_grid):
            raise RangeError("x grid must be sorted ascending")
        if not 0 <= self.seed < 2**64:
            raise RangeError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.partitions < 1:
            raise RangeError(f"partitions must be >= 1, got {self.partitions}")
        if self.block_size < 1:
            raise RangeError("block size must be positive")
        if self.n < 1:
            raise RangeError(f"sample size must be positive, got {self.n}")


@dataclass
class SimulationRow:
    x: float
    p_theory: float
    p_hat: float
    se: float
    wilson_lo: float
    wilson_hi: float
    ratio: float


@dataclass
class SimulationResult:
    kind: str
    N: int
    n: int
    seed: int
    replications: int
    rows: list[SimulationRow] = field(default_factory=list)
    elapsed: float = 0.0

    def csv_rows(self) -> list[list]:
        return [[self.kind, self.N, self.n, repr(r.x), repr(r.p_theory), repr(r.p_hat),
                 repr(r.se), repr(r.wilson_lo), repr(r.wilson_hi), repr(r.ratio),
                 self.replications, self.seed] for r in self.rows]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "N": self.N, "n": self.n, "seed": self.seed,
            "reps": self.replications, "elapsed": self.elapsed,
            "rows": [vars(r) for r in self.rows],
        }


def write_csv(results: Sequence[SimulationResult], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for res in results:
        w.writerows(res.csv_rows())


def to_csv(results: Sequence[SimulationResult]) -> str:
    buf = io.StringIO()
    write_csv(results, buf)
    return buf.getvalue()


def to_json(results: Sequence[SimulationResult]) -> str:
    return json.dumps(jsonable([r.to_dict() for r in results]), indent=2)


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _cascade(n: int, p: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """Conditional-binomial draws: cell m ~ Bin(remaining, p_m / remaining mass)."""
    N = len(p)
    tail_mass = np.cumsum(p[::-1])[::-1]
    out = np.empty((size, N), dtype=np.int64)
    remaining = np.full(size, n, dtype=np.int64)
    for m in range(N - 1):
        q = min(1.0, p[m] / tail_mass[m])
        c = rng.binomial(remaining, q)
        out[:, m] = c
        remaining -= c
    out[:, N - 1] = remaining
    return out


def sample_multinomial(n: int, probs, rng: np.random.Generator) -> np.ndarray:
    """One multinomial count vector."""
    probs = as_probs(probs)
    return _cascade(n, probs.array, 1, rng)[0]


def _blocks(reps: int, block_size: int) -> list[tuple[int, int]]:
    full, rest = divmod(reps, block_size)
    sizes = [block_size] * full + ([rest] if rest else [])
    return list(enumerate(sizes))


def draw_counts(n: int, probs, reps: int, seed: int, partitions: int = 1,
                block_size: int = DEFAULT_BLOCK) -> np.ndarray:
    """All ``reps`` count vectors, in block order."""
    probs = as_probs(probs)
    p = probs.array

    def work(job):
        b, size = job
        return _cascade(n, p, size, block_generator(seed, b))

    with ThreadPoolExecutor(max_workers=partitions) as pool:
        parts = list(pool.map(work, _blocks(reps, block_size)))
    return np.concatenate(parts, axis=0)


def wilson_interval(k: int, reps: int, z: float = WILSON_Z) -> tuple[float, float]:
    phat = k / reps
    denom = 1 + z * z / reps
    centre = (phat + z * z / (2 * reps)) / denom
    half = z * math.sqrt(phat * (1 - phat) / reps + z * z / (4 * reps * reps)) / denom
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == reps else min(1.0, centre + half)
    return lo, hi


def estimate_tail(config: SimulationConfig) -> SimulationResult:
    """Empirical ``P(standardized statistic > x)`` for each ``x`` in the grid."""
    need = config.replications * len(config.x_grid)
    if need > config.budget:
        raise BudgetError(f"replications x grid points = {need} exceeds budget {config.budget}; "
                          f"raise the budget to at least {need} or reduce the work")
    start = time.perf_counter()
    probs = config.probs
    p = probs.array
    prof = decomposable.profile(probs, config.n, config.kind)
    center, scale = decomposable.center_and_scale(config.kind, prof, probs.N, config.centering)
    grid = np.array(config.x_grid)
    mu = config.n * p

    def work(job):
        b, size = job
        counts = _cascade(config.n, p, size, block_generator(config.seed, b))
        if config.kind == "chi2":
            s = ((counts - mu) ** 2 / mu).sum(axis=1)
        else:
            s = 2.0 * decomposable.xlogy(counts, counts / mu).sum(axis=1)
        z = (s - center) / scale
        return (z[:, None] > grid[None, :]).sum(axis=0)

    with ThreadPoolExecutor(max_workers=config.partitions) as pool:
        per_block = list(pool.map(work, _blocks(config.replications, config.block_size)))
    hits = np.sum(per_block, axis=0)

    reps = config.replications
    rows = []
    for x, k in zip(config.x_grid, hits.tolist()):
        phat = k / reps
        pt = normal_tail(x)
        lo, hi = wilson_interval(k, reps)
        rows.append(SimulationRow(x, pt, phat, math.sqrt(phat * (1 - phat) / reps), lo, hi,
                                  phat / pt))
    return SimulationResult(config.kind, probs.N, config.n, config.seed, reps, rows,
                            time.perf_counter() - start)


def convergence_study(base: SimulationConfig, N_grid: Sequence[int],
                      lambda_fixed: float) -> list[SimulationResult]:
    """One equiprobable run per ``N`` with ``n = ceil(lambda * N)``."""
    out = []
    for N in N_grid:
        cfg = SimulationConfig(
            n=math.ceil(lambda_fixed * N),
            probs=ProbabilityVector.uniform(N),
            kind=base.kind,
            replications=base.replications,
            x_grid=base.x_grid,
            seed=base.seed,
            partitions=base.partitions,
            centering=base.centering,
            budget=base.budget,
            block_size=base.block_size,
        )
        out.append(estimate_tail(cfg))
    return out
