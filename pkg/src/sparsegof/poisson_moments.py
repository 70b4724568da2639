"""Exact central moments of the Poisson distribution.

For xi ~ Poisson(lam) the central moment E(xi - lam)**nu is a polynomial in
``lam`` with no constant term:

    mu_nu(lam) = nu! * sum_{l=1}^{nu//2} c[l, nu] * lam**l

The coefficients ``c[l, nu]`` are positive rationals and ``nu! * c[l, nu]`` are
integers. Two independent routes compute them: the derivative recursion
``mu_{v+1} = v*lam*mu_{v-1} + lam * d/dlam mu_v`` (the production route) and
a sum over integer partitions of ``nu`` into parts >= 2 (the oracle route).
A third, purely numeric route sums ``(j - lam)**nu`` against the pmf.
"""

from __future__ import annotations

import csv
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence, TextIO

import numpy as np
from scipy import special, stats

from .errors import OracleFailure, RangeError

MAX_ORDER = 40
MAX_ORACLE_TERMS = 10**7


@dataclass(frozen=True)
class MomentPolynomial:
    """Coefficients ``c[l, nu]`` for ``l = 1 .. nu // 2`` as exact fractions."""

    order: int
    coefficients: tuple[Fraction, ...]

    def coefficient(self, l: int) -> Fraction:
        if not 1 <= l <= len(self.coefficients):
            raise RangeError(f"l={l} outside 1..{len(self.coefficients)} for nu={self.order}")
        return self.coefficients[l - 1]

    @property
    def scaled(self) -> tuple[int, ...]:
        """Integer coefficients ``nu! * c[l, nu]`` of ``lam**l``."""
        f = math.factorial(self.order)
        out = []
        for c in self.coefficients:
            v = f * c
            assert v.denominator == 1
            out.append(v.numerator)
        return tuple(out)

    def __call__(self, lam, exact: bool = False):
        """Evaluate ``mu_nu(lam)``; with ``exact=True`` the result is a Fraction."""
        if exact:
            lam = Fraction(lam)
            acc = Fraction(0)
        else:
            lam = float(lam)
            acc = 0.0
        # Horner over integer coefficients; no constant term.
        for a in reversed(self.scaled):
            acc = (acc + a) * lam
        return acc


def _check_order(nu: int, max_order: int = MAX_ORDER) -> None:
    if not isinstance(nu, (int, np.integer)) or isinstance(nu, bool):
        raise RangeError(f"moment order must be an integer, got {nu!r}")
    if nu < 2 or nu > max_order:
        raise RangeError(f"moment order {nu} outside 2..{max_order}")


class _RecursionTable:
    """Integer polynomials mu_0 .. mu_K built once by the derivative recursion.

    Entry ``v`` is a list ``a`` with ``mu_v(lam) = sum_l a[l] * lam**l``.
    Extension happens under a lock so concurrent callers observe a single
    initialization.
    """

    def __init__(self) -> None:
        self._polys: list[list[int]] = [[1], [0]]
        self._lock = threading.Lock()

    def get(self, nu: int) -> list[int]:
        if nu >= len(self._polys):
            with self._lock:
                while len(self._polys) <= nu:
                    self._extend()
        return self._polys[nu]

    def _extend(self) -> None:
        v = len(self._polys) - 1
        prev, cur = self._polys[v - 1], self._polys[v]
        size = max(len(prev) + 1, len(cur))
        nxt = [0] * size
        for l, a in enumerate(prev):
            nxt[l + 1] += v * a
        for l, a in enumerate(cur):
            nxt[l] += l * a
        while len(nxt) > 1 and nxt[-1] == 0:
            nxt.pop()
        self._polys.append(nxt)


_TABLE = _RecursionTable()


def moment_coefficients(nu: int, max_order: int = MAX_ORDER) -> MomentPolynomial:
    """Coefficients of ``mu_nu`` from the derivative recursion.

    >>> moment_coefficients(4).coefficients
    (Fraction(1, 24), Fraction(1, 8))
    """
    _check_order(nu, max_order)
    poly = _TABLE.get(nu)
    f = math.factorial(nu)
    coeffs = tuple(Fraction(poly[l], f) if l < len(poly) else Fraction(0)
                   for l in range(1, nu // 2 + 1))
    return MomentPolynomial(nu, coeffs)


def _partitions_min2(total: int, largest: int) -> Iterator[list[int]]:
    """Partitions of ``total`` into parts in ``2..largest``, parts non-increasing."""
    if total == 0:
        yield []
        return
    for part in range(min(total, largest), 1, -1):
        for rest in _partitions_min2(total - part, part):
            yield [part] + rest


def moment_coefficients_bruno(nu: int, max_order: int = MAX_ORDER) -> MomentPolynomial:
    """Coefficients of ``mu_nu`` by summing over partitions of ``nu`` into parts >= 2.

    Each partition with multiplicities ``k_m`` of part ``m`` contributes
    ``prod_m 1 / (k_m! * (m!)**k_m)`` to ``c[l, nu]`` where ``l = sum_m k_m``.
    """
    _check_order(nu, max_order)
    coeffs = [Fraction(0)] * (nu // 2)
    for parts in _partitions_min2(nu, nu):
        mult: dict[int, int] = {}
        for m in parts:
            mult[m] = mult.get(m, 0) + 1
        denom = 1
        for m, k in mult.items():
            denom *= math.factorial(k) * math.factorial(m) ** k
        coeffs[len(parts) - 1] += Fraction(1, denom)
    return MomentPolynomial(nu, tuple(coeffs))


def central_moment(nu: int, lam, exact: bool = False):
    """``E(xi - lam)**nu`` for ``xi ~ Poisson(lam)``."""
    _check_rate(lam)
    return moment_coefficients(nu)(lam, exact=exact)


def standardized_moment(nu: int, lam) -> float:
    """``E((xi - lam) / sqrt(lam))**nu``."""
    _check_rate(lam)
    return central_moment(nu, lam) / float(lam) ** (nu / 2)


def _check_rate(lam) -> None:
    if not lam > 0:
        raise RangeError(f"Poisson rate must be positive, got {lam!r}")


def truncated_poisson(lam: float, mass_tol: float,
                      weight: Callable[[np.ndarray], np.ndarray] | None = None,
                      max_terms: int = MAX_ORACLE_TERMS) -> tuple[np.ndarray, np.ndarray]:
    """Support ``0..J`` and pmf of Poisson(lam), truncated by the shared mass rule.

    ``J`` is the first index at which the remaining upper-tail mass is below
    ``mass_tol`` and each of the last ten weighted terms ``pmf * weight`` is
    below ``mass_tol`` times the running sum of weighted terms. Without a
    weight only the pmf itself is checked.
    """
    lam = float(lam)
    _check_rate(lam)
    step = int(lam + 12.0 * math.sqrt(lam) + 64)
    hi = 0
    while True:
        hi = min(hi + step, max_terms)
        j = np.arange(hi + 1)
        pmf = np.exp(special.xlogy(j, lam) - lam - special.gammaln(j + 1.0))
        terms = np.abs(pmf * weight(j)) if weight is not None else pmf
        running = np.cumsum(terms)
        small = (terms < mass_tol * running).astype(np.int64)
        window = np.convolve(small, np.ones(10, dtype=np.int64))[: len(small)]
        residual = stats.poisson.sf(j, lam)
        ok = np.nonzero((residual < mass_tol) & (window == 10))[0]
        if ok.size:
            stop = int(ok[0])
            return j[: stop + 1], pmf[: stop + 1]
        if hi >= max_terms:
            raise OracleFailure(
                f"Poisson({lam}) truncation did not converge within {max_terms} terms")
        step *= 2


def central_moment_oracle(nu: int, lam: float, mass_tol: float = 1e-15,
                          absolute: bool = False) -> float:
    """Brute-force ``E(xi - lam)**nu`` (or ``E|xi - lam|**nu``) by pmf summation.

    Test-only reference; independent of the polynomial coefficients.
    """
    if not 0 < mass_tol <= 1e-8:
        raise RangeError(f"mass_tol must lie in (0, 1e-8], got {mass_tol}")
    if nu < 0:
        raise RangeError(f"moment order must be non-negative, got {nu}")
    _check_rate(lam)
    if lam > 1e6:
        raise RangeError(f"rate {lam} exceeds oracle limit 1e6")
    lam = float(lam)
    j, pmf = truncated_poisson(lam, mass_tol, weight=lambda j: np.abs(j - lam) ** nu)
    dev = j - lam
    vals = (np.abs(dev) if absolute else dev) ** nu * pmf
    return math.fsum(vals.tolist())


def coefficient_rows(orders: Iterable[int]) -> Iterator[tuple[int, int, int, int]]:
    for nu in orders:
        for l, c in enumerate(moment_coefficients(nu).coefficients, start=1):
            yield nu, l, c.numerator, c.denominator


def write_coefficients_csv(fh: TextIO, orders: Sequence[int]) -> None:
    """Write ``nu,l,numerator,denominator`` rows for the given orders."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["nu", "l", "numerator", "denominator"])
    w.writerows(coefficient_rows(orders))


def read_coefficients_csv(fh: TextIO) -> dict[int, MomentPolynomial]:
    rows: dict[int, dict[int, Fraction]] = {}
    for row in csv.DictReader(fh):
        nu, l = int(row["nu"]), int(row["l"])
        rows.setdefault(nu, {})[l] = Fraction(int(row["numerator"]), int(row["denominator"]))
    return {nu: MomentPolynomial(nu, tuple(d[l] for l in sorted(d))) for nu, d in rows.items()}
