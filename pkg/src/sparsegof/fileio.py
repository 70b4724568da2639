"""Probability vectors, counts, and the plain-text value files the CLI reads."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import RangeError, ShapeError

SUM_TOL = 1e-12


@dataclass(frozen=True)
class ProbabilityVector:
    """Cell probabilities ``p_1..p_N``, validated and renormalized.

    ``values`` holds Fractions in exact mode and floats otherwise.
    """

    values: tuple

    @classmethod
    def from_values(cls, values: Iterable, exact: bool | None = None,
                    tol: float = SUM_TOL) -> "ProbabilityVector":
        vals = list(values)
        if not vals:
            raise ShapeError("empty probability vector")
        if exact is None:
            exact = all(isinstance(v, (int, Fraction)) for v in vals)
        if exact:
            vals = [Fraction(v) for v in vals]
            total = sum(vals, Fraction(0))
        else:
            vals = [float(v) for v in vals]
            total = math.fsum(vals)
        if any(not (v > 0) for v in vals):
            raise RangeError("every cell probability must be positive")
        if abs(float(total) - 1.0) > tol:
            raise RangeError(f"probabilities sum to {float(total)!r}, not 1 within {tol}")
        return cls(tuple(v / total for v in vals))

    @classmethod
    def uniform(cls, N: int, exact: bool = False) -> "ProbabilityVector":
        if N < 1:
            raise RangeError(f"need at least one cell, got {N}")
        v = Fraction(1, N) if exact else 1.0 / N
        return cls(tuple([v] * N))

    @property
    def N(self) -> int:
        return len(self.values)

    @property
    def exact(self) -> bool:
        return isinstance(self.values[0], Fraction)

    @property
    def array(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])

    @property
    def p_min(self) -> float:
        return float(min(self.values))

    @property
    def p_max(self) -> float:
        return float(max(self.values))


def as_probs(probs) -> ProbabilityVector:
    if isinstance(probs, ProbabilityVector):
        return probs
    return ProbabilityVector.from_values(probs)


def as_counts(counts, N: int | None = None) -> np.ndarray:
    arr = np.asarray(counts)
    if arr.dtype.kind not in "iu":
        if not np.all(arr == np.round(arr)):
            raise RangeError("counts must be integers")
        arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise RangeError("counts must be non-negative")
    if N is not None and arr.shape[-1] != N:
        raise ShapeError(f"{arr.shape[-1]} counts for {N} cells")
    return arr


def parse_value(token: str, exact: bool = False):
    token = token.strip()
    if "/" in token:
        return Fraction(token)
    if exact:
        return Fraction(token)
    v = float(token)
    return int(v) if token.lstrip("+-").isdigit() else v


def read_values(path: str | Path, exact: bool = False) -> list:
    """Read one value per line; ``#`` starts a comment, ``a/b`` is a rational."""
    out = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(parse_value(line, exact))
        except (ValueError, ZeroDivisionError) as exc:
            raise RangeError(f"{path}:{lineno}: cannot parse {line!r}") from exc
    return out


def read_vector(path: str | Path, exact: bool = False) -> list:
    """A JSON array or a one-value-per-line file."""
    text = Path(path).read_text().strip()
    if text.startswith("["):
        vals = json.loads(text)
        return [Fraction(str(v)) if exact else v for v in vals]
    return read_values(path, exact)


def read_probs(path: str | Path, exact: bool = False) -> ProbabilityVector:
    return ProbabilityVector.from_values(read_values(path, exact), exact=exact or None)


def read_counts(path: str | Path) -> np.ndarray:
    vals = read_values(path)
    if any(isinstance(v, Fraction) or not float(v).is_integer() for v in vals):
        raise RangeError(f"{path}: counts must be integers")
    return as_counts([int(v) for v in vals])


def write_values(path: str | Path, values: Sequence) -> None:
    Path(path).write_text("".join(f"{v}\n" for v in values))


def jsonable(obj):
    """Recursively convert Fractions, numpy scalars and non-finite floats for ``json``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    return obj
