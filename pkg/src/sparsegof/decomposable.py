"""Pearson and likelihood-ratio statistics and their Poissonized characteristics.

Both statistics are decomposable: a sum over cells of ``h_m(eta_m)``. Their
normal approximation is built from four numbers computed with independent
``xi_m ~ Poisson(n p_m)`` in place of the multinomial counts:

    A          = sum_m E h_m(xi_m)
    gamma      = (1/n) sum_m cov(h_m(xi_m), xi_m)
    sigma_t^2  = sum_m Var h_m(xi_m)
    sigma^2    = sigma_t^2 - n gamma^2

Cell functions take ``(x, mean)`` where ``mean = n p_m`` and must accept
numpy arrays for ``x``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.special import xlogy

from . import poisson_moments
from .cumulants import moments_to_cumulants
from .errors import DegenerateProfileError, RangeError, ShapeError
from .fileio import ProbabilityVector, as_counts, as_probs

CellFunction = Callable[[np.ndarray, float], np.ndarray]

KINDS = {"chi2": "chi2", "chi-square": "chi2", "chisq": "chi2", "lr": "lr", "LR": "lr", "g": "lr"}


def normalize_kind(kind: str) -> str:
    try:
        return KINDS[kind]
    except KeyError:
        raise RangeError(f"unknown statistic kind {kind!r}; use 'chi2' or 'lr'") from None


def chi_square_cell(x, mean):
    return (x - mean) ** 2 / mean


def lr_cell(x, mean):
    # 0 * log 0 = 0
    x = np.asarray(x, dtype=float)
    mean = np.asarray(mean, dtype=float)
    return xlogy(x, x / mean)


def linear_cell(x, mean):
    return x - mean


@dataclass(frozen=True)
class StatisticProfile:
    A: float
    gamma: float
    sigma_tilde_sq: float
    sigma_sq: float
    lambda_n: float
    nabla: float

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma_sq)

    def to_dict(self) -> dict:
        return asdict(self)


def _expected(counts, probs: ProbabilityVector):
    counts = as_counts(counts, probs.N)
    n = counts.sum(axis=-1, keepdims=counts.ndim > 1)
    if np.any(n < 1):
        raise RangeError("sample size must be at least 1")
    return counts, n * probs.array


def chi_square_statistic(counts, probs) -> float | np.ndarray:
    """Pearson's ``sum (eta - n p)**2 / (n p)``; rows of a 2-d array are separate samples."""
    probs = as_probs(probs)
    counts, mu = _expected(counts, probs)
    return ((counts - mu) ** 2 / mu).sum(axis=-1)


def log_likelihood_ratio(counts, probs) -> float | np.ndarray:
    """``2 sum eta log(eta / (n p))`` with empty cells contributing zero."""
    probs = as_probs(probs)
    counts, mu = _expected(counts, probs)
    return 2.0 * xlogy(counts, counts / mu).sum(axis=-1)


def statistic(counts, probs, kind: str):
    kind = normalize_kind(kind)
    return chi_square_statistic(counts, probs) if kind == "chi2" else log_likelihood_ratio(counts, probs)


def _check_n(n) -> None:
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise RangeError(f"sample size must be a positive integer, got {n!r}")


def chi_square_profile(probs, n: int) -> StatisticProfile:
    """Closed-form characteristics of the Pearson statistic."""
    probs = as_probs(probs)
    _check_n(n)
    N = probs.N
    lam = n / N
    inv = math.fsum(1.0 / (n * p) for p in probs.array)
    sigma_tilde_sq = inv + 2.0 * N
    return StatisticProfile(
        A=float(N),
        gamma=1.0 / lam,
        sigma_tilde_sq=sigma_tilde_sq,
        sigma_sq=sigma_tilde_sq - N / lam,
        lambda_n=lam,
        nabla=max(1.0, 1.0 / (n * probs.p_min)),
    )


def _cell_moments(h: CellFunction, mean: float, mass_tol: float) -> tuple[float, float, float]:
    """``(E h, Var h, cov(h, xi))`` under ``xi ~ Poisson(mean)`` by truncated summation."""
    def weight(j):
        return np.asarray(h(j, mean), dtype=float) ** 2 + (j - mean) ** 2 + 1.0

    j, pmf = poisson_moments.truncated_poisson(mean, mass_tol, weight=weight)
    hv = np.asarray(h(j, mean), dtype=float)
    mass = math.fsum(pmf.tolist())
    eh = math.fsum((hv * pmf).tolist()) / mass
    dh = hv - eh
    var = math.fsum((dh * dh * pmf).tolist()) / mass
    cov = math.fsum((dh * (j - mean) * pmf).tolist()) / mass
    return eh, var, cov


def _cells(cell_functions, N: int) -> list[CellFunction]:
    if callable(cell_functions):
        return [cell_functions] * N
    cells = list(cell_functions)
    if len(cells) != N:
        raise ShapeError(f"{len(cells)} cell functions for {N} cells")
    return cells


def generic_profile(cell_functions: CellFunction | Sequence[CellFunction], probs, n: int,
                    mass_tol: float = 1e-15) -> StatisticProfile:
    """Characteristics of ``sum_m h_m(eta_m)`` by numeric Poisson summation."""
    probs = as_probs(probs)
    _check_n(n)
    N = probs.N
    cells = _cells(cell_functions, N)
    cache: dict = {}
    means, variances, covs = [], [], []
    for h, p in zip(cells, probs.array):
        key = (id(h), float(p))
        if key not in cache:
            cache[key] = _cell_moments(h, n * float(p), mass_tol)
        eh, var, cov = cache[key]
        means.append(eh)
        variances.append(var)
        covs.append(cov)
    gamma = math.fsum(covs) / n
    sigma_tilde_sq = math.fsum(variances)
    return StatisticProfile(
        A=math.fsum(means),
        gamma=gamma,
        sigma_tilde_sq=sigma_tilde_sq,
        sigma_sq=sigma_tilde_sq - n * gamma * gamma,
        lambda_n=n / N,
        nabla=max(1.0, 1.0 / (n * probs.p_min)),
    )


def lr_profile_asymptotic(probs, n: int) -> StatisticProfile:
    """First-order expansions for ``h(x) = x log(x / (n p))`` (half the LR statistic).

    With ``s = sum_m 1 / (n p_m)``: ``A = N/2 + s/12``, ``gamma = 1 - s/(12 n)``
    and ``sigma^2 = N/2 + s/6``. The variance correction is positive; this was
    checked against 40-digit Poisson summation (per cell ``1/2 + 1/(6 lam)``).
    Accuracy degrades when the mean cell count is small; below 5 a
    ``RuntimeWarning`` is issued but values are still returned.
    """
    probs = as_probs(probs)
    _check_n(n)
    N = probs.N
    lam = n / N
    if lam < 5:
        warnings.warn(f"mean cell count {lam:.3g} < 5; LR expansion is unreliable",
                      RuntimeWarning, stacklevel=2)
    inv = math.fsum(1.0 / (n * p) for p in probs.array)
    gamma = 1.0 - inv / (12.0 * n)
    sigma_sq = N / 2.0 + inv / 6.0
    return StatisticProfile(
        A=N / 2.0 + inv / 12.0,
        gamma=gamma,
        sigma_tilde_sq=sigma_sq + n * gamma * gamma,
        sigma_sq=sigma_sq,
        lambda_n=lam,
        nabla=max(1.0, 1.0 / (n * probs.p_min)),
    )


def profile(probs, n: int, kind: str) -> StatisticProfile:
    kind = normalize_kind(kind)
    if kind == "chi2":
        return chi_square_profile(probs, n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return lr_profile_asymptotic(probs, n)


def center_and_scale(kind: str, profile: StatisticProfile, N: int,
                     centering: str = "N") -> tuple[float, float]:
    kind = normalize_kind(kind)
    if centering not in ("N", "N-1"):
        raise RangeError(f"centering must be 'N' or 'N-1', got {centering!r}")
    center = float(N) if centering == "N" else float(N - 1)
    if kind == "chi2":
        if not profile.sigma_sq > 0:
            raise DegenerateProfileError("chi-square profile has zero variance")
        return center, profile.sigma
    if N < 1:
        raise DegenerateProfileError("LR scaling needs at least one cell")
    return center, math.sqrt(2.0 * N)


def standardize(t, kind: str, profile: StatisticProfile, N: int, centering: str = "N"):
    """``(t - N) / sigma`` for Pearson, ``(t - N) / sqrt(2N)`` for LR."""
    center, scale = center_and_scale(kind, profile, N, centering)
    return (t - center) / scale


def chi_square_cell_cumulants(lam, K: int) -> list[Fraction]:
    """Exact cumulants ``C_1..C_K`` of ``(xi - lam)**2 / lam`` for ``xi ~ Poisson(lam)``."""
    lam = Fraction(lam)
    if 2 * K > poisson_moments.MAX_ORDER:
        raise RangeError(f"order {K} needs central moments beyond {poisson_moments.MAX_ORDER}")
    raw = [poisson_moments.central_moment(2 * j, lam, exact=True) / lam ** j
           for j in range(1, K + 1)]
    return moments_to_cumulants(raw, exact=True)
