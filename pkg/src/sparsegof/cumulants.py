"""Moment/cumulant conversion and cumulant-decay certificates.

Vectors are plain sequences indexed from order 1: ``moments[0]`` is the mean
``alpha_1`` and ``cumulants[0]`` is ``C_1``. Exact mode works on
``fractions.Fraction`` throughout; float mode sums partition terms with
``math.fsum``.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import ContractError, RangeError, ShapeError

FLOAT_MAX_ORDER = 20
EXACT_MAX_ORDER = 40


@lru_cache(maxsize=None)
def _partitions(k: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Partitions of ``k`` as tuples of ``(part, multiplicity)`` pairs."""
    out = []

    def rec(remaining: int, largest: int, acc: list[tuple[int, int]]) -> None:
        if remaining == 0:
            out.append(tuple(acc))
            return
        for part in range(min(remaining, largest), 0, -1):
            for mult in range(remaining // part, 0, -1):
                acc.append((part, mult))
                rec(remaining - part * mult, part - 1, acc)
                acc.pop()

    rec(k, k, [])
    return tuple(out)


def _check_len(values: Sequence, exact: bool, minimum: int = 2) -> None:
    cap = EXACT_MAX_ORDER if exact else FLOAT_MAX_ORDER
    if len(values) < minimum:
        raise RangeError(f"need at least {minimum} orders, got {len(values)}")
    if len(values) > cap:
        raise RangeError(f"order {len(values)} exceeds the {'exact' if exact else 'float'} cap {cap}")


def moments_to_cumulants(moments: Sequence, exact: bool = False) -> list:
    """Cumulants ``C_1..C_K`` from raw moments ``alpha_1..alpha_K``.

    Uses the partition-sum form

        C_k = k! * sum (-1)**(M-1) * (M-1)! * prod_l (alpha_l / l!)**m_l / m_l!

    over ``m_1 + 2 m_2 + ... + k m_k = k`` with ``M = sum m_l``.
    """
    _check_len(moments, exact)
    alpha = [Fraction(a) for a in moments] if exact else [float(a) for a in moments]
    K = len(alpha)
    scaled = [alpha[l - 1] / math.factorial(l) for l in range(1, K + 1)]
    out = []
    for k in range(1, K + 1):
        terms = []
        for partition in _partitions(k):
            M = sum(m for _, m in partition)
            coef = Fraction((-1) ** (M - 1) * math.factorial(M - 1) * math.factorial(k))
            for _, m in partition:
                coef /= math.factorial(m)
            if exact:
                t = coef
                for l, m in partition:
                    t *= scaled[l - 1] ** m
            else:
                t = float(coef)
                for l, m in partition:
                    t *= scaled[l - 1] ** m
            terms.append(t)
        out.append(sum(terms, Fraction(0)) if exact else math.fsum(terms))
    return out


def cumulants_to_moments(cumulants: Sequence, exact: bool = False) -> list:
    """Raw moments from cumulants via ``alpha_k = sum_j binom(k-1, j-1) C_j alpha_{k-j}``."""
    _check_len(cumulants, exact)
    c = [Fraction(v) for v in cumulants] if exact else [float(v) for v in cumulants]
    alpha = [Fraction(1) if exact else 1.0]
    for k in range(1, len(c) + 1):
        terms = [math.comb(k - 1, j - 1) * c[j - 1] * alpha[k - j] for j in range(1, k + 1)]
        alpha.append(sum(terms, Fraction(0)) if exact else math.fsum(terms))
    return alpha[1:]


def sum_independent_cumulants(parts: Sequence[Sequence]) -> list:
    """Componentwise sum; cumulants add over independent summands."""
    if not parts:
        raise ShapeError("no cumulant vectors to combine")
    K = len(parts[0])
    for p in parts:
        if len(p) != K:
            raise ShapeError(f"cumulant vectors of different lengths: {K} vs {len(p)}")
    exact = all(isinstance(v, (int, Fraction)) for p in parts for v in p)
    if exact:
        return [sum((Fraction(p[i]) for p in parts), Fraction(0)) for i in range(K)]
    return [math.fsum(float(p[i]) for p in parts) for i in range(K)]


@dataclass(frozen=True)
class DeltaCertificate:
    """``|C_k| <= (k!)**(1+nu) * delta**-(k-2)`` for ``3 <= k <= K``.

    ``K`` is ``None`` when the bound is asserted for every order (as when it is
    derived from a moment bound).
    """

    delta: float
    nu: float = 1.0
    K: int | None = None

    def bound(self, k: int) -> float:
        if math.isinf(self.delta):
            return 0.0
        return math.factorial(k) ** (1 + self.nu) * self.delta ** -(k - 2)

    def log_bound(self, k: int) -> float:
        if math.isinf(self.delta):
            return -math.inf
        return (1 + self.nu) * math.lgamma(k + 1) - (k - 2) * math.log(self.delta)

    def holds_for(self, cumulants: Sequence, rtol: float = 1e-12) -> bool:
        # compared in logs so subnormal cumulants and huge deltas do not overflow
        upper = len(cumulants) if self.K is None else min(self.K, len(cumulants))
        for k in range(3, upper + 1):
            ck = abs(float(cumulants[k - 1]))
            if ck == 0.0:
                continue
            if math.log(ck) > self.log_bound(k) + math.log1p(rtol):
                return False
        return True


def statulevicius_delta(cumulants: Sequence, nu: float = 1.0, tol: float = 1e-9) -> DeltaCertificate:
    """Largest ``delta`` for which a standardized cumulant vector obeys the decay bound."""
    if len(cumulants) < 3:
        raise RangeError("need cumulants up to at least order 3")
    c1, c2 = float(cumulants[0]), float(cumulants[1])
    if abs(c1) > tol or abs(c2 - 1.0) > tol:
        raise ContractError(f"cumulants must be standardized (C1=0, C2=1), got C1={c1}, C2={c2}")
    log_delta = math.inf
    for k in range(3, len(cumulants) + 1):
        ck = abs(float(cumulants[k - 1]))
        if ck == 0.0:
            continue
        log_delta = min(log_delta, ((1 + nu) * math.lgamma(k + 1) - math.log(ck)) / (k - 2))
    if math.isinf(log_delta):
        delta = math.inf
    else:
        delta = math.exp(min(log_delta, math.log(sys.float_info.max)))
    cert = DeltaCertificate(delta, nu, len(cumulants))
    if not cert.holds_for(cumulants):
        raise AssertionError(f"certificate {cert} fails on its own input")
    return cert


def bernstein_to_delta(B: float, nu: float = 1.0) -> DeltaCertificate:
    """A moment bound with base ``B`` yields a cumulant bound with ``delta = 1/(2B)``."""
    if not B > 0:
        raise RangeError(f"Bernstein constant must be positive, got {B}")
    return DeltaCertificate(1.0 / (2.0 * B), nu, None)


def tail_validity_range(delta: float, k_tilde: float) -> float:
    """Upper end of the deviation range ``min(sqrt(k_tilde), delta**(1/3)) / 12``."""
    if not delta > 0:
        raise RangeError(f"delta must be positive, got {delta}")
    if not k_tilde >= 3:
        raise RangeError(f"usable cumulant order must be >= 3, got {k_tilde}")
    return min(math.sqrt(k_tilde), delta ** (1.0 / 3.0)) / 12.0
