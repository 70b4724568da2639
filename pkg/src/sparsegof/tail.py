"""Normal-tail p-values for the Pearson and LR statistics, with zone diagnostics.

The approximation ``P(T > N + x * scale) ~ 1 - Phi(x)`` has relative error
``1 + o(1)`` only while ``x`` stays below a few problem-dependent caps. Those
caps are asymptotic, so we report ``x / cap`` and classify it rather than
refuse: below 0.5 is "inside", below 1 "near boundary", otherwise "outside zone".
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from . import decomposable
from .cumulants import tail_validity_range
from .decomposable import StatisticProfile, normalize_kind
from .errors import RangeError
from .fileio import as_probs

NEAR_BOUNDARY = 0.5
DEFAULT_CONSTANTS = {"C1": 1.0, "C2": 1.0, "C3": 1.0, "C4": 1.0}


def normal_tail(x: float) -> float:
    """``1 - Phi(x)`` computed as ``erfc(x / sqrt(2)) / 2`` (no cancellation for large x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def classify(ratio: float) -> str:
    if ratio < NEAR_BOUNDARY:
        return "inside"
    if ratio < 1.0:
        return "near boundary"
    return "outside zone"


@dataclass
class ZoneDiagnostics:
    caps: dict
    cap_ratios: dict
    flags: dict
    k_tilde: float
    delta: float
    x_max: float


def zone_diagnostics(probs, n: int, x: float, kind: str, constants: dict | None = None,
                     profile: StatisticProfile | None = None) -> ZoneDiagnostics:
    """Validity caps and condition checks for a deviation ``x >= 0``.

    Never raises on a zone violation; violations are reported in ``flags``.
    """
    kind = normalize_kind(kind)
    probs = as_probs(probs)
    if x < 0:
        raise RangeError(f"deviation must be non-negative, got {x}")
    consts = dict(DEFAULT_CONSTANTS)
    consts.update(constants or {})
    N = probs.N
    lam = n / N
    p_max = probs.p_max
    if profile is None:
        profile = decomposable.chi_square_profile(probs, n) if kind == "chi2" else None

    if kind == "chi2":
        sigma3 = profile.sigma_sq ** 1.5
        caps = {
            "variance_ratio": (sigma3 / (profile.sigma_tilde_sq * profile.nabla)) ** (1 / 3),
            "sample_size": n ** (1 / 6),
            "max_cell": p_max ** -0.25,
        }
        zone_caps = list(caps)
        caps["near_uniform"] = N ** (1 / 6) * min(1.0, lam ** (2 / 3))
        k_tilde = min(p_max ** -0.5, n ** (1 / 3))
        # large delta = small cumulants (reciprocal of the Bernstein base)
        delta = sigma3 / (2.0 ** 13 * profile.nabla * profile.sigma_tilde_sq)
    else:
        caps = {"cells": N ** (1 / 6), "max_cell": p_max ** -0.25}
        zone_caps = list(caps)
        k_tilde = p_max ** -0.5
        delta = math.sqrt(N) / 2.0 ** 12

    ratios = {name: x / cap for name, cap in caps.items()}
    Np_min, Np_max = N * probs.p_min, N * p_max
    flags = {
        "zone": classify(max(ratios[c] for c in zone_caps)),
        "chi2_cell_balance": consts["C1"] <= Np_min <= Np_max <= consts["C2"] * N ** (1 / 3),
        "chi2_mean_count_above_half": lam > 0.5,
        "lr_cell_balance": consts["C3"] <= Np_min <= Np_max <= consts["C4"] * lam ** 3,
        "lr_mean_count_at_least_5": lam >= 5,
    }
    if "near_uniform" in caps:
        flags["near_uniform_zone"] = classify(ratios["near_uniform"])
    if k_tilde >= 3:
        x_max = tail_validity_range(delta, k_tilde)
        flags["cumulant_range"] = "inside" if x <= x_max else "outside zone"
    else:
        x_max = 0.0
        flags["cumulant_range"] = "not applicable"
    return ZoneDiagnostics(caps, ratios, flags, k_tilde, delta, x_max)


@dataclass
class TailReport:
    kind: str
    statistic: float
    x: float
    p_upper: float
    p_lower: float
    caps: dict = field(default_factory=dict)
    cap_ratios: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    k_tilde: float = 0.0
    delta: float = 0.0
    x_max: float = 0.0
    profile: StatisticProfile | None = None

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "statistic": self.statistic,
            "x": self.x,
            "p_upper": self.p_upper,
            "p_lower": self.p_lower,
            "caps": self.caps,
            "cap_ratios": self.cap_ratios,
            "flags": self.flags,
            "k_tilde": self.k_tilde,
            "delta": self.delta,
            "x_max": self.x_max,
        }
        if self.profile is not None:
            out["profile"] = self.profile.to_dict()
        return out


def tail_pvalue(t: float, kind: str, probs, n: int, centering: str = "N",
                constants: dict | None = None) -> TailReport:
    """Approximate ``P(T >= t)`` and ``P(T <= t)`` by the standard normal tail.

    ``p_upper = 1 - Phi(x)`` and ``p_lower = Phi(x)`` with ``x`` the
    standardized value of ``t``; diagnostics are evaluated at ``|x|``.
    """
    kind = normalize_kind(kind)
    probs = as_probs(probs)
    if kind == "chi2" and t < 0:
        raise RangeError(f"chi-square statistic cannot be negative, got {t}")
    if kind == "lr" and n / probs.N < 5:
        warnings.warn(f"mean cell count {n / probs.N:.3g} < 5; LR approximation needs many "
                      "observations per cell", RuntimeWarning, stacklevel=2)
    prof = decomposable.profile(probs, n, kind)
    x = decomposable.standardize(t, kind, prof, probs.N, centering)
    diag = zone_diagnostics(probs, n, abs(x), kind, constants,
                            profile=prof if kind == "chi2" else None)
    return TailReport(
        kind=kind,
        statistic=float(t),
        x=x,
        p_upper=normal_tail(x),
        p_lower=normal_tail(-x),
        caps=diag.caps,
        cap_ratios=diag.cap_ratios,
        flags=diag.flags,
        k_tilde=diag.k_tilde,
        delta=diag.delta,
        x_max=diag.x_max,
        profile=prof,
    )
