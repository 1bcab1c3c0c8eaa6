"""Closed-form baseline schemes the fusion protocol is measured against.

Covers heralded SPDC sources (thermal photon statistics), the single-shot
multiport interferometer, the analytic non-recycled doubling ladder, and
the limited-recycling ladder with its d^4.419 scaling law.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .probabilities import log_factorial, p_sub_equal_balanced

__all__ = [
    "LIMITED_RECYCLING_EXPONENT",
    "DoublingEstimate",
    "LadderEstimate",
    "spdc_lambda_sq",
    "spdc_pprep",
    "single_shot_pbunch",
    "single_shot_rate",
    "next_power_of_two",
    "doubling_expected_singles",
    "doubling_expected_fusions",
    "doubling_estimate",
    "doubling_stirling_form",
    "limited_recycling_success",
    "limited_recycling_scaling",
    "limited_recycling_expected_singles",
]

# log_{3/2} 6: one ladder level costs ~6 states and multiplies the size by 3/2.
LIMITED_RECYCLING_EXPONENT = math.log(6.0) / math.log(1.5)


def _check_nbar(nbar: float) -> float:
    nbar = float(nbar)
    if not nbar > 0:
        raise DomainError(f"mean photon number must be positive, got {nbar}")
    return nbar


def spdc_lambda_sq(nbar: float, n: int) -> float:
    """Probability of an n-photon pair from an SPDC source with mean nbar.

    The thermal law |lambda_n|^2 = (nbar/(nbar+1))^n / (nbar+1).
    """
    nbar = _check_nbar(nbar)
    n = operator.index(n)
    if n < 0:
        raise DomainError(f"photon number must be non-negative, got {n}")
    return (nbar / (nbar + 1.0)) ** n / (nbar + 1.0)


def spdc_pprep(nbar: float, d: int) -> float:
    """Probability that a heralded SPDC shot yields at least d photons.

    The geometric tail (nbar/(nbar+1))^d.
    """
    nbar = _check_nbar(nbar)
    d = operator.index(d)
    if d < 0:
        raise DomainError(f"target must be non-negative, got {d}")
    return (nbar / (nbar + 1.0)) ** d


def single_shot_pbunch(n: int) -> float:
    """Bunching probability n!/n^n of n single photons in one multiport.

    Evaluated in log space so it survives n in the thousands.
    """
    n = operator.index(n)
    if n < 1:
        raise DomainError(f"need at least one photon, got {n}")
    return math.exp(log_factorial(n) - n * math.log(n))


def single_shot_rate(d: int) -> float:
    """Single-shot preparation rate d!/d^(d+1) per beamsplitter operation.

    The d-port interferometer uses d beamsplitters per attempt, hence the
    extra power of d relative to the bunching probability.
    """
    d = operator.index(d)
    if d < 1:
        raise DomainError(f"target must be at least 1, got {d}")
    return math.exp(log_factorial(d) - (d + 1) * math.log(d))


def next_power_of_two(d: int) -> int:
    d = operator.index(d)
    if d < 1:
        raise DomainError(f"target must be at least 1, got {d}")
    return 1 << (d - 1).bit_length()


def doubling_expected_singles(d: int) -> float:
    """Expected single photons consumed by the non-recycled doubling scheme.

    The scheme fuses equal pairs at eta = 1/sqrt(2), discarding every s > 0
    outcome, doubling 1 -> 2 -> ... -> d. Each level multiplies the cost by
    2/P_sub(0|k,k). Non-powers of two round up to the next power.
    """
    d = next_power_of_two(d)
    log_total = 0.0
    k = d
    while k > 1:
        k //= 2
        log_total += math.log(2.0) - math.log(p_sub_equal_balanced(k))
    return math.exp(log_total)


def doubling_expected_fusions(d: int) -> float:
    """Expected fusion operations for one state from the doubling scheme.

    Producing a 2k-state takes 1/P_sub(0|k,k) attempts; each attempt costs
    one fusion plus two fresh k-states. Useful to convert the single-photon
    cost into a rate per fusion operation, the unit simulations report.
    """
    d = next_power_of_two(d)

    def f(size: int) -> float:
        if size == 1:
            return 0.0
        half = size // 2
        return (1.0 + 2.0 * f(half)) / p_sub_equal_balanced(half)

    return f(d)


def doubling_stirling_form(d: int) -> float:
    """Stirling approximation d^(3/4 + log2(pi)/2 + log2(d)/4) of the cost."""
    d = operator.index(d)
    if d < 1:
        raise DomainError(f"target must be at least 1, got {d}")
    log2d = math.log2(d)
    exponent = 0.75 + 0.5 * math.log2(math.pi) + 0.25 * log2d
    return float(d) ** exponent


@dataclass(frozen=True)
class DoublingEstimate:
    """Cost report of the doubling scheme for one requested target."""

    d_requested: int
    d_used: int
    expected_singles: float
    expected_fusions: float
    stirling_ratio: float


def doubling_estimate(d: int) -> DoublingEstimate:
    """Full doubling-scheme report, including the Stirling-form ratio."""
    used = next_power_of_two(d)
    singles = doubling_expected_singles(used)
    return DoublingEstimate(
        d_requested=operator.index(d),
        d_used=used,
        expected_singles=singles,
        expected_fusions=doubling_expected_fusions(used),
        stirling_ratio=singles / doubling_stirling_form(used),
    )


def limited_recycling_success(n: int) -> float:
    """Probability that fusing two n-states loses no more than n/2 photons.

    Sum of P_sub(s|n,n) over s <= floor(n/2) at eta = 1/sqrt(2), evaluated
    exactly: odd s vanish there, and s = 2t has the closed form
    2^(-2n) (2t)! (2n-2t)! C(n,t)^2 / (n!)^2. Approaches ~1/3 from
    alternating sides as n grows.
    """
    n = operator.index(n)
    if n < 1:
        raise DomainError(f"need at least one photon per input, got {n}")
    nf = math.factorial(n)
    den = 4**n * nf * nf
    total = Fraction(0)
    for t in range(n // 4 + 1):
        if 2 * t > n // 2:
            break
        num = (
            math.factorial(2 * t)
            * math.factorial(2 * n - 2 * t)
            * math.comb(n, t) ** 2
        )
        total += Fraction(num, den)
    return float(total)


def limited_recycling_scaling(d: float) -> float:
    """Single-photon cost scaling d^(log_{3/2} 6) of the limited ladder."""
    d = float(d)
    if d <= 1.0:
        raise DomainError(f"scaling is defined for targets above 1, got {d}")
    return d**LIMITED_RECYCLING_EXPONENT


@dataclass(frozen=True)
class LadderEstimate:
    """Cost report of the limited-recycling ladder."""

    d_requested: int
    d_reached: int
    expected_singles: float
    levels: int


def limited_recycling_expected_singles(d: int) -> LadderEstimate:
    """Expected singles for the limited-recycling ladder reaching >= d.

    Level i fuses two n-states and keeps outcomes with s <= n/2, so the
    size grows to at least ceil(3n/2) at success probability
    limited_recycling_success(n); failures are discarded. The ladder stops
    at the first size >= d. This conservative ladder realizes the
    d^4.419 scaling law.
    """
    d = operator.index(d)
    if d < 2:
        raise DomainError(f"target must be at least 2, got {d}")
    size = 1
    singles = 1.0
    levels = 0
    while size < d:
        singles = 2.0 * singles / limited_recycling_success(size)
        size = size + size - (size // 2)
        levels += 1
    return LadderEstimate(d, size, singles, levels)
