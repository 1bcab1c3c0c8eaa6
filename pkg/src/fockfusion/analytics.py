"""Post-processing of rate curves: power-law fits and crossover solving."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .baselines import spdc_pprep
from .errors import DomainError

__all__ = [
    "PowerLawFit",
    "fit_power_law",
    "spdc_crossover",
    "improvement_factor",
]


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit rate = prefactor * d^exponent in log-log space."""

    exponent: float
    prefactor: float
    r_squared: float
    points_used: int

    def predict(self, d: float) -> float:
        return self.prefactor * float(d) ** self.exponent


def fit_power_law(
    points: Sequence[tuple[float, float]],
    *,
    stderrs: Sequence[float] | None = None,
) -> PowerLawFit:
    """Fit a power law to (d, rate) pairs.

    Requires at least 4 points with positive d and rate; zero-rate points
    cannot be placed on the log-log plane and are rejected rather than
    silently dropped, so undersampled simulations fail loudly. The default
    fit is unweighted; passing per-point rate standard errors weights each
    point by its inverse relative error.
    """
    pts = [(float(d), float(r)) for d, r in points]
    if len(pts) < 4:
        raise DomainError(f"power-law fit needs at least 4 points, got {len(pts)}")
    for d, r in pts:
        if d <= 0 or r <= 0:
            raise DomainError(f"power-law fit needs positive values, got ({d}, {r})")
    log_d = np.log([d for d, _ in pts])
    log_r = np.log([r for _, r in pts])
    weights = None
    if stderrs is not None:
        if len(stderrs) != len(pts):
            raise DomainError(
                f"got {len(stderrs)} stderrs for {len(pts)} points"
            )
        if any(s <= 0 for s in stderrs):
            raise DomainError("stderr weights must be positive")
        # sigma of log(rate) is stderr/rate; polyfit wants w = 1/sigma
        weights = np.array([r / s for (_, r), s in zip(pts, stderrs)])
    slope, intercept = np.polyfit(log_d, log_r, 1, w=weights)
    residuals = log_r - (slope * log_d + intercept)
    ss_res = float(np.dot(residuals, residuals))
    centered = log_r - log_r.mean()
    ss_tot = float(np.dot(centered, centered))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return PowerLawFit(
        exponent=float(slope),
        prefactor=float(math.exp(intercept)),
        r_squared=r_squared,
        points_used=len(pts),
    )


def spdc_crossover(d: int, target_rate: float) -> float:
    """Mean photon number where an SPDC source prepares >= d at target_rate.

    Solves (nbar/(nbar+1))^d = target_rate by bisection; the left side is
    strictly increasing in nbar with range (0, 1), so a root exists exactly
    when 0 < target_rate < 1.
    """
    d = int(d)
    if d < 1:
        raise DomainError(f"target must be at least 1, got {d}")
    target_rate = float(target_rate)
    if not 0.0 < target_rate < 1.0:
        raise DomainError(
            f"crossover exists only for rates strictly inside (0, 1), got {target_rate}"
        )
    # closed form nbar = q/(1-q) with q = target^(1/d); bisection confirms it
    q = target_rate ** (1.0 / d)
    nbar = q / (1.0 - q)
    lo, hi = nbar / 2.0, nbar * 2.0
    while spdc_pprep(lo, d) > target_rate:
        lo /= 2.0
    while spdc_pprep(hi, d) < target_rate:
        hi *= 2.0
    while hi - lo > 1e-10 * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        if spdc_pprep(mid, d) < target_rate:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def improvement_factor(d: int, rate_a: float, rate_b: float) -> float:
    """How many times faster scheme A prepares d-states than scheme B."""
    d = int(d)
    if d < 1:
        raise DomainError(f"target must be at least 1, got {d}")
    rate_a = float(rate_a)
    rate_b = float(rate_b)
    if rate_a <= 0 or rate_b <= 0:
        raise DomainError(f"rates must be positive, got ({rate_a}, {rate_b})")
    return rate_a / rate_b
