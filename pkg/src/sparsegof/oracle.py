"""Ground truth for tiny multinomial instances by full enumeration.

Probabilities are kept as exact fractions. When the cell probabilities are
floats, ``Fraction(float)`` is used, so the enumeration is exact for the
binary values actually supplied. The Poisson side (conditioning independent
Poisson counts on their total) is evaluated in 40-digit ``mpmath`` because
``exp(-n p)`` is irrational.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence, TextIO

import mpmath
import numpy as np

from . import poisson_moments
from .cumulants import moments_to_cumulants, sum_independent_cumulants
from .decomposable import _cells, chi_square_cell, lr_cell, normalize_kind
from .errors import RangeError, TooLargeError
from .fileio import ProbabilityVector, as_probs

ENUMERATION_GUARD = 10**7
_DPS = 40


@dataclass
class OutcomeTable:
    n: int
    probs: ProbabilityVector
    counts: np.ndarray  # shape (M, N), lexicographic order
    probabilities: list[Fraction]

    @property
    def N(self) -> int:
        return self.probs.N

    @property
    def exact(self) -> bool:
        return self.probs.exact

    def __len__(self) -> int:
        return len(self.probabilities)

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        head = [f"eta_{m}" for m in range(1, self.N + 1)]
        w.writerow(head + (["prob_num", "prob_den"] if self.exact else ["prob"]))
        for row, p in zip(self.counts.tolist(), self.probabilities):
            w.writerow(row + ([p.numerator, p.denominator] if self.exact else [repr(float(p))]))


def outcome_count(n: int, N: int) -> int:
    return math.comb(n + N - 1, N - 1)


def _compositions(n: int, N: int) -> Iterator[tuple[int, ...]]:
    if N == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, N - 1):
            yield (first,) + rest


def enumerate_multinomial(n: int, probs, guard: int = ENUMERATION_GUARD) -> OutcomeTable:
    """Every count vector with its multinomial probability."""
    probs = as_probs(probs)
    if n < 0:
        raise RangeError(f"sample size must be non-negative, got {n}")
    size = outcome_count(n, probs.N)
    if size > guard:
        raise TooLargeError(f"{size} outcomes exceed the enumeration guard {guard}")
    # integer arithmetic over a common denominator D: p_m = a_m / D
    p = [Fraction(v) for v in probs.values]
    D = math.lcm(*(q.denominator for q in p))
    a = [q.numerator * (D // q.denominator) for q in p]
    powers = [[am ** e for e in range(n + 1)] for am in a]
    fact = [math.factorial(i) for i in range(n + 1)]
    scale = D ** n
    rows, weights = [], []
    for eta in _compositions(n, probs.N):
        coef = fact[n]
        num = 1
        for m, e in enumerate(eta):
            coef //= fact[e]
            num *= powers[m][e]
        rows.append(eta)
        weights.append(Fraction(coef * num, scale))
    counts = np.array(rows, dtype=np.int64).reshape(len(rows), probs.N)
    return OutcomeTable(n, probs, counts, weights)


def _cell_means(table: OutcomeTable) -> list:
    if table.exact:
        return [table.n * Fraction(v) for v in table.probs.values]
    return [table.n * float(v) for v in table.probs.values]


def statistic_values(table: OutcomeTable, cell_functions) -> list:
    """``R = sum_m h_m(eta_m)`` for every outcome; exact fractions when the cells allow."""
    cells = _cells(cell_functions, table.N)
    means = _cell_means(table)
    if table.exact:
        # a cell value depends only on its own count, so tabulate h_m(0..n) once
        lookup = [[h(e, mu) for e in range(table.n + 1)] for h, mu in zip(cells, means)]
        if all(isinstance(t, (int, Fraction)) for col in lookup for t in col):
            D = math.lcm(*(Fraction(t).denominator for col in lookup for t in col))
            ints = [[int(Fraction(t) * D) for t in col] for col in lookup]
            return [Fraction(sum(ints[m][e] for m, e in enumerate(eta)), D)
                    for eta in table.counts.tolist()]
        flt = [[float(t) for t in col] for col in lookup]
        return [math.fsum(flt[m][e] for m, e in enumerate(eta)) for eta in table.counts.tolist()]
    total = np.zeros(len(table))
    for m, (h, mu) in enumerate(zip(cells, means)):
        total += np.asarray(h(table.counts[:, m], mu), dtype=float)
    return total.tolist()


def _kind_cells(kind: str):
    return chi_square_cell if normalize_kind(kind) == "chi2" else lr_cell


def exact_tail(n: int, probs, kind: str, threshold: float, strict: bool = False) -> float:
    """``P(T >= threshold)`` (or ``P(T > threshold)`` with ``strict``) by enumeration.

    ``T`` is the Pearson statistic or the full LR statistic ``2 sum eta log(eta/(np))``.
    """
    kind = normalize_kind(kind)
    table = enumerate_multinomial(n, probs)
    values = statistic_values(table, _kind_cells(kind))
    if kind == "lr":
        values = [2 * v for v in values]
    hit = [p for v, p in zip(values, table.probabilities)
           if (v > threshold if strict else v >= threshold)]
    return float(sum(hit, Fraction(0)))


def _power_sum(values: list, weights: list, k: int):
    if all(isinstance(v, (int, Fraction)) for v in values):
        # integer numerators over common denominators
        vals = [Fraction(v) for v in values]
        wts = [Fraction(w) for w in weights]
        dv = math.lcm(*(v.denominator for v in vals))
        dw = math.lcm(*(w.denominator for w in wts))
        total = sum((w.numerator * (dw // w.denominator)) * (v.numerator * (dv // v.denominator)) ** k
                    for v, w in zip(vals, wts))
        return Fraction(total, dw * dv ** k)
    return math.fsum(float(w) * v ** k for v, w in zip(values, weights))


def exact_moment_multinomial(n: int, probs, cell_functions, k: int):
    """``E R^k`` over the multinomial law; a Fraction when every value is rational."""
    if not 0 <= k <= 8:
        raise RangeError(f"moment order {k} outside 0..8")
    table = enumerate_multinomial(n, probs)
    return _power_sum(statistic_values(table, cell_functions), table.probabilities, k)


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def conditioned_poisson_moment(n: int, probs, cell_functions, k: int) -> float:
    """``E(T^k | sum xi = n)`` with independent ``xi_m ~ Poisson(n p_m)``.

    The joint Poisson weights on the composition support are divided by the
    independently computed ``P(Poisson(n) = n)``, not by their own sum.
    """
    if not 0 <= k <= 8:
        raise RangeError(f"moment order {k} outside 0..8")
    table = enumerate_multinomial(n, probs)
    values = statistic_values(table, cell_functions)
    with mpmath.workdps(_DPS):
        means = [n * _to_mpf(Fraction(v)) for v in table.probs.values]
        log_pmf = [[-mu + (e * mpmath.log(mu) if e else 0) - mpmath.loggamma(e + 1)
                    for e in range(n + 1)] for mu in means]
        acc = mpmath.mpf(0)
        for eta, v in zip(table.counts.tolist(), values):
            w = mpmath.exp(mpmath.fsum(log_pmf[m][e] for m, e in enumerate(eta)))
            acc += w * _to_mpf(v) ** k
        p_total = mpmath.exp(-n + n * mpmath.log(n) - mpmath.loggamma(n + 1)) if n else mpmath.mpf(1)
        return float(acc / p_total)


def _central_moments(values: list, weights: list, K: int) -> tuple:
    mean = _power_sum(values, weights, 1)
    if isinstance(mean, Fraction):
        dev = [Fraction(v) - mean for v in values]
    else:
        dev = [float(v) - mean for v in values]
    return mean, [_power_sum(dev, weights, k) if k > 1 else 0 * mean for k in range(1, K + 1)]


def _poisson_cell_cumulants(h, mean: float, K: int, mass_tol: float) -> list[float]:
    def weight(j):
        return np.abs(np.asarray(h(j, mean), dtype=float)) ** K + 1.0

    j, pmf = poisson_moments.truncated_poisson(mean, mass_tol, weight=weight)
    hv = np.asarray(h(j, mean), dtype=float)
    mass = math.fsum(pmf.tolist())
    mu1 = math.fsum((hv * pmf).tolist()) / mass
    dev = hv - mu1
    central = [0.0] + [math.fsum((dev ** k * pmf).tolist()) / mass for k in range(2, K + 1)]
    c = moments_to_cumulants(central) if K >= 2 else [0.0]
    c[0] = mu1
    return c


def exact_cumulants(n: int, probs, cell_functions, K: int, which: str = "R",
                    mass_tol: float = 1e-15) -> list:
    """Cumulants ``C_1..C_K`` of the multinomial ``R`` or the Poissonized ``T``.

    ``R`` goes through enumerated moments; ``T`` sums per-cell cumulants of
    ``h_m(xi_m)`` because the Poisson counts are independent.
    """
    if not 1 <= K <= 6:
        raise RangeError(f"cumulant order {K} outside 1..6")
    probs = as_probs(probs)
    if which == "R":
        table = enumerate_multinomial(n, probs)
        values = statistic_values(table, cell_functions)
        mean, central = _central_moments(values, table.probabilities, K)
        exact = isinstance(mean, Fraction)
        if K == 1:
            return [mean]
        c = moments_to_cumulants(central, exact=exact)
        c[0] = mean
        return c
    if which != "T":
        raise RangeError(f"which must be 'R' or 'T', got {which!r}")
    cells = _cells(cell_functions, probs.N)
    cache: dict = {}
    parts = []
    for h, p in zip(cells, probs.array):
        key = (id(h), float(p))
        if key not in cache:
            cache[key] = _poisson_cell_cumulants(h, n * float(p), K, mass_tol)
        parts.append(cache[key])
    return sum_independent_cumulants(parts)


class NuN(NamedTuple):
    value: float
    deviation: float  # value - 1/sqrt(2 pi)


LIMIT = 1.0 / math.sqrt(2.0 * math.pi)


def nu_n(n: int) -> NuN:
    """``n! e^n / (2 pi n^n sqrt(n))`` evaluated in the log domain."""
    if n < 1:
        raise RangeError(f"n must be at least 1, got {n}")
    log_v = math.lgamma(n + 1) + n - (n + 0.5) * math.log(n) - math.log(2.0 * math.pi)
    v = math.exp(log_v)
    return NuN(v, v - LIMIT)
