"""Closed-form fusion outcome probabilities with a layered precision policy.

Mixing Fock states |m> and |n> on a beamsplitter with reflectivity eta and
counting s photons in the monitored output heralds an (m+n-s)-photon state.
The closed form for the detection probability contains an inner sum whose
terms alternate in sign (the ratio eta^2/(eta^2-1) is negative), so plain
double precision loses all accuracy once m+n grows. Every public entry
point therefore routes through a PrecisionPolicy that picks one of three
evaluation paths:

* exact rational arithmetic when eta^2 snaps to a small fraction (covers
  the ubiquitous eta = 1/sqrt(2), where eta^2 rounds to 0.5 + 1 ulp),
* compensated double precision for small m+n,
* arbitrary-precision floats above the switch threshold, escalating the
  working digits until the distribution normalizes.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from .errors import DomainError, PrecisionError

__all__ = [
    "PrecisionPolicy",
    "DEFAULT_POLICY",
    "SubtractionDistribution",
    "binomial",
    "log_factorial",
    "p_sub",
    "p_sub_exact",
    "subtraction_distribution",
    "p_grow",
    "p_sub_equal_balanced",
]

# Distributions whose total probability strays further than this trigger
# escalation to the next precision level (and finally PrecisionError).
NORM_TOL = 1e-8
# Entries in [-CLAMP_TOL, 0) are rounding noise and clamp to zero; anything
# more negative is treated as a precision failure.
CLAMP_TOL = 1e-15


def binomial(a: int, b: int) -> int:
    """Exact binomial coefficient C(a, b) as an arbitrary-size integer.

    Args:
        a: Total number of items, a >= 0.
        b: Items chosen, 0 <= b <= a.

    Returns:
        C(a, b) exactly.

    Raises:
        DomainError: If a or b is negative or b > a.
    """
    a = operator.index(a)
    b = operator.index(b)
    if a < 0 or b < 0 or b > a:
        raise DomainError(f"binomial({a}, {b}) is outside the domain 0 <= b <= a")
    return math.comb(a, b)


def log_factorial(k: int) -> float:
    """Natural log of k!, exact to about 1e-12 relative error.

    Args:
        k: Non-negative integer.

    Returns:
        ln(k!) as a float.

    Raises:
        DomainError: If k is negative.
    """
    k = operator.index(k)
    if k < 0:
        raise DomainError(f"log_factorial({k}) is undefined")
    return math.lgamma(k + 1)


@dataclass(frozen=True)
class PrecisionPolicy:
    """Selects and escalates the evaluation path for probability formulas.

    Attributes:
        switch_threshold: Largest m+n evaluated in compensated double
            precision; larger totals go straight to arbitrary precision.
        digits: Baseline working digits for the arbitrary-precision path.
            The actual working precision also scales with m+n because the
            alternating terms grow like C(m, m/2)*C(n, n/2).
        snap_denominator: eta^2 is snapped to the nearest fraction with a
            denominator at most this large, if one is close enough.
        snap_rtol: Relative tolerance for accepting the snapped fraction.
        max_escalations: How many times the digit count may double after a
            failed normalization check before giving up.
    """

    switch_threshold: int = 40
    digits: int = 50
    snap_denominator: int = 128
    snap_rtol: float = 1e-12
    max_escalations: int = 2

    def working_digits(self, total: int) -> int:
        # C(n, n/2) ~ 2^n/sqrt(n) per input, so the alternating terms carry
        # about 0.302*(m+n) decimal digits that cancellation can eat.
        return max(self.digits, 25 + int(0.35 * total))


DEFAULT_POLICY = PrecisionPolicy()


@dataclass(frozen=True)
class SubtractionDistribution:
    """Distribution of the detected photon number s for one fusion.

    Attributes:
        m: Photon number in the first input.
        n: Photon number in the second input.
        eta: Beamsplitter reflectivity.
        probs: probs[s] for s in 0..m+n, normalized within NORM_TOL.
    """

    m: int
    n: int
    eta: float
    probs: np.ndarray

    def __getitem__(self, s: int) -> float:
        return float(self.probs[s])

    def __len__(self) -> int:
        return len(self.probs)

    def as_dict(self) -> dict[int, float]:
        return {s: float(p) for s, p in enumerate(self.probs)}


def _validate_counts(s: int | None, m: int, n: int) -> tuple[int | None, int, int]:
    m = operator.index(m)
    n = operator.index(n)
    if m < 0 or n < 0:
        raise DomainError(f"photon numbers must be non-negative, got m={m}, n={n}")
    if s is not None:
        s = operator.index(s)
        if s < 0:
            raise DomainError(f"detected count must be non-negative, got s={s}")
        if s > m + n:
            raise DomainError(f"cannot detect s={s} photons from m+n={m + n}")
    return s, m, n


def _validate_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0 or math.isnan(eta):
        raise DomainError(f"reflectivity must lie in [0, 1], got {eta}")
    return eta


def _snap_stay_probability(eta: float, policy: PrecisionPolicy) -> Fraction | None:
    """Return eta^2 as a small exact fraction if one is within snap_rtol."""
    u_exact = Fraction(eta) ** 2
    snapped = u_exact.limit_denominator(policy.snap_denominator)
    if snapped <= 0 or snapped >= 1:
        return None
    if abs(snapped - u_exact) <= Fraction(policy.snap_rtol) * u_exact:
        return snapped
    return None


def p_sub_exact(s: int, m: int, n: int, u: Fraction) -> Fraction:
    """P_sub(s | m, n) as an exact rational, for rational stay probability u.

    The closed form is
        u^(n-s) (1-u)^(m+s) * s!(m+n-s)!/(m!n!) * T^2,
        T = sum_j C(m,j) C(n,s-j) (u/(u-1))^j,
    evaluated here entirely in integer arithmetic by pulling the common
    power of (u-1) out of T.

    Args:
        s: Detected photon number, 0 <= s <= m+n.
        m: First input photon number.
        n: Second input photon number.
        u: Stay probability eta^2 as an exact Fraction in (0, 1).

    Returns:
        The probability as an exact Fraction.

    Raises:
        DomainError: On count violations or u outside (0, 1).
    """
    s, m, n = _validate_counts(s, m, n)
    u = Fraction(u)
    if not 0 < u < 1:
        raise DomainError(f"exact path requires 0 < u < 1, got {u}")
    a, b = u.numerator, u.denominator
    j0, j1 = max(0, s - n), min(s, m)
    # T * (a-b)^j1 = sum_j C(m,j) C(n,s-j) a^j (a-b)^(j1-j), an integer.
    t_scaled = sum(
        math.comb(m, j) * math.comb(n, s - j) * a**j * (a - b) ** (j1 - j)
        for j in range(j0, j1 + 1)
    )
    num = math.factorial(s) * math.factorial(m + n - s) * t_scaled * t_scaled
    num *= (b - a) ** (m + s)
    den = math.factorial(m) * math.factorial(n) * b ** (m + n) * (b - a) ** (2 * j1)
    if n >= s:
        num *= a ** (n - s)
    else:
        den *= a ** (s - n)
    return Fraction(num, den)


def _p_sub_float(s: int, m: int, n: int, u: float) -> float:
    j0, j1 = max(0, s - n), min(s, m)
    x = u / (u - 1.0)
    inner = math.fsum(
        math.comb(m, j) * math.comb(n, s - j) * x**j for j in range(j0, j1 + 1)
    )
    logpref = (
        (n - s) * math.log(u)
        + (m + s) * math.log1p(-u)
        + math.lgamma(s + 1)
        + math.lgamma(m + n - s + 1)
        - math.lgamma(m + 1)
        - math.lgamma(n + 1)
    )
    return math.exp(logpref) * inner * inner


def _dist_float(m: int, n: int, u: float) -> np.ndarray:
    return np.array([_p_sub_float(s, m, n, u) for s in range(m + n + 1)])


def _dist_mp(m: int, n: int, eta: float, dps: int) -> np.ndarray:
    with mp.workdps(dps):
        u = mp.mpf(eta) ** 2
        x = u / (u - 1)
        one_minus_u = 1 - u
        out = np.empty(m + n + 1)
        for s in range(m + n + 1):
            j0, j1 = max(0, s - n), min(s, m)
            terms = []
            x_pow = x**j0
            for j in range(j0, j1 + 1):
                terms.append(math.comb(m, j) * math.comb(n, s - j) * x_pow)
                x_pow = x_pow * x
            inner = mp.fsum(terms)
            ratio = Fraction(
                math.factorial(s) * math.factorial(m + n - s),
                math.factorial(m) * math.factorial(n),
            )
            pref = (
                u ** (n - s)
                * one_minus_u ** (m + s)
                * mp.mpf(ratio.numerator)
                / mp.mpf(ratio.denominator)
            )
            out[s] = float(pref * inner * inner)
    return out


def _delta_distribution(m: int, n: int, at: int) -> np.ndarray:
    probs = np.zeros(m + n + 1)
    probs[at] = 1.0
    return probs


def _check_and_clamp(probs: np.ndarray) -> bool:
    if np.any(probs < -CLAMP_TOL):
        return False
    if abs(math.fsum(probs) - 1.0) > NORM_TOL:
        return False
    np.clip(probs, 0.0, None, out=probs)
    return True


def subtraction_distribution(
    m: int, n: int, eta: float, *, policy: PrecisionPolicy = DEFAULT_POLICY
) -> SubtractionDistribution:
    """Full outcome distribution {s: P_sub(s|m,n,eta)} for one fusion.

    Endpoint reflectivities are defined by continuity: eta=1 leaves the
    inputs unmixed (the monitored mode keeps its m photons) and eta=0 swaps
    the modes, so the distributions are delta functions at s=m and s=n.

    Args:
        m: First input photon number.
        n: Second input photon number.
        eta: Beamsplitter reflectivity in [0, 1].
        policy: Precision policy controlling path selection and escalation.

    Returns:
        A SubtractionDistribution normalized within NORM_TOL.

    Raises:
        DomainError: On invalid counts or reflectivity.
        PrecisionError: If no precision level within the policy's escalation
            budget produces a normalized distribution.
    """
    _, m, n = _validate_counts(None, m, n)
    eta = _validate_eta(eta)
    if m + n == 0:
        return SubtractionDistribution(m, n, eta, np.array([1.0]))
    if eta == 0.0:
        return SubtractionDistribution(m, n, eta, _delta_distribution(m, n, n))
    if eta == 1.0:
        return SubtractionDistribution(m, n, eta, _delta_distribution(m, n, m))

    u_frac = _snap_stay_probability(eta, policy)
    if u_frac is not None:
        exact = [p_sub_exact(s, m, n, u_frac) for s in range(m + n + 1)]
        if sum(exact) != 1:
            raise PrecisionError(
                f"exact rational distribution for (m={m}, n={n}, u={u_frac}) "
                "does not sum to 1; this is a bug"
            )
        return SubtractionDistribution(m, n, eta, np.array([float(p) for p in exact]))

    failures = []
    if m + n <= policy.switch_threshold:
        probs = _dist_float(m, n, float(eta) * float(eta))
        if _check_and_clamp(probs):
            return SubtractionDistribution(m, n, eta, probs)
        failures.append("double")

    dps = policy.working_digits(m + n)
    for attempt in range(policy.max_escalations + 1):
        probs = _dist_mp(m, n, eta, dps << attempt)
        if _check_and_clamp(probs):
            return SubtractionDistribution(m, n, eta, probs)
        failures.append(f"mp-{dps << attempt}")
    raise PrecisionError(
        f"distribution for (m={m}, n={n}, eta={eta}) failed normalization "
        f"after paths {failures}"
    )


def p_sub(
    s: int, m: int, n: int, eta: float, *, policy: PrecisionPolicy = DEFAULT_POLICY
) -> float:
    """Probability of detecting s photons when fusing |m> and |n>.

    Args:
        s: Detected photon number, 0 <= s <= m+n.
        m: First input photon number.
        n: Second input photon number.
        eta: Beamsplitter reflectivity in [0, 1].
        policy: Precision policy controlling path selection.

    Returns:
        P_sub(s | m, n) as a float.

    Raises:
        DomainError: On invalid counts or reflectivity.
        PrecisionError: If escalation is exhausted (only reachable through
            the distribution-level normalization check).
    """
    s, m, n = _validate_counts(s, m, n)
    eta = _validate_eta(eta)
    if m + n == 0:
        return 1.0
    if eta == 0.0:
        return 1.0 if s == n else 0.0
    if eta == 1.0:
        return 1.0 if s == m else 0.0
    u_frac = _snap_stay_probability(eta, policy)
    if u_frac is not None:
        return float(p_sub_exact(s, m, n, u_frac))
    if m + n <= policy.switch_threshold:
        return _p_sub_float(s, m, n, float(eta) * float(eta))
    # Single entries above the threshold ride the distribution path so the
    # normalization check can vet the working precision.
    return subtraction_distribution(m, n, eta, policy=policy)[s]


def p_grow(
    m: int,
    n: int,
    eta: float,
    recycled: bool,
    *,
    policy: PrecisionPolicy = DEFAULT_POLICY,
) -> float:
    """Probability that one fusion grows the photon number.

    With recycling every outcome strictly larger than both inputs counts,
    i.e. s <= min(m,n)-1. Without recycling only the lossless outcome s=0
    is kept.

    Args:
        m: First input photon number, m >= 1.
        n: Second input photon number, n >= 1.
        eta: Beamsplitter reflectivity.
        recycled: Whether sub-threshold outcomes are retained.
        policy: Precision policy.

    Returns:
        The growth probability.
    """
    _, m, n = _validate_counts(None, m, n)
    if m < 1 or n < 1:
        raise DomainError(f"fusion inputs must hold at least one photon, got {m}, {n}")
    if not recycled:
        return p_sub(0, m, n, eta, policy=policy)
    dist = subtraction_distribution(m, n, eta, policy=policy)
    return float(math.fsum(dist.probs[: min(m, n)]))


def p_sub_equal_balanced(n: int) -> float:
    """P_sub(0 | n, n) at eta = 1/sqrt(2): 2^(-2n) (2n)!/(n!)^2.

    Evaluated with log-factorials so it stays finite for large n; the value
    behaves like 1/sqrt(pi*n) asymptotically.

    Args:
        n: Photon number of both inputs, n >= 1.

    Returns:
        The bunching probability as a float.
    """
    n = operator.index(n)
    if n < 1:
        raise DomainError(f"equal-input fusion needs n >= 1, got {n}")
    return math.exp(
        -2 * n * math.log(2.0) + log_factorial(2 * n) - 2 * log_factorial(n)
    )
