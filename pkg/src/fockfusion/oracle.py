"""Brute-force fusion distributions for validating the closed form.

Two routes that share nothing with the closed form in probabilities.py:

* a dense unitary exp(-i*theta*G) on the (m+n)-photon two-mode block,
  built by eigendecomposition of the beamsplitter generator, and
* a polynomial convolution of the two binomially expanded mode operators.

Both are capped at validation scale; they exist to be compared against,
not to be fast.
"""

from __future__ import annotations

import math
import operator

import numpy as np

from .errors import CapacityError, DomainError
from .probabilities import _validate_counts, _validate_eta

__all__ = [
    "MATRIX_CAP",
    "CONVOLUTION_CAP",
    "generator_block",
    "beamsplitter_unitary",
    "oracle_distribution",
    "convolution_distribution",
]

MATRIX_CAP = 24
CONVOLUTION_CAP = 60


def generator_block(total: int) -> np.ndarray:
    """Beamsplitter generator restricted to the block with `total` photons.

    The two-mode generator a'b + ab' is block diagonal in total photon
    number; on the block spanned by |k, total-k> it is the real symmetric
    tridiagonal matrix with off-diagonal entries sqrt((k+1)(total-k)).

    Args:
        total: Total photon number N of the block, N >= 0.

    Returns:
        The (N+1) x (N+1) generator matrix.
    """
    total = operator.index(total)
    if total < 0:
        raise DomainError(f"block size must be non-negative, got {total}")
    g = np.zeros((total + 1, total + 1))
    k = np.arange(total)
    off = np.sqrt((k + 1.0) * (total - k))
    g[k, k + 1] = off
    g[k + 1, k] = off
    return g


def beamsplitter_unitary(total: int, theta: float) -> np.ndarray:
    """exp(-i*theta*G) on the `total`-photon block, via eigendecomposition.

    The reflectivity convention is eta = cos(theta), so a single photon
    stays in its mode with probability eta^2.

    Args:
        total: Total photon number N, 0 <= N <= MATRIX_CAP.
        theta: Mixing angle in [0, pi/2].

    Returns:
        The (N+1) x (N+1) complex unitary.

    Raises:
        CapacityError: If total exceeds MATRIX_CAP.
        DomainError: If theta is outside [0, pi/2].
    """
    total = operator.index(total)
    if total > MATRIX_CAP:
        raise CapacityError(
            f"matrix route caps at {MATRIX_CAP} photons, got {total}"
        )
    theta = float(theta)
    if not 0.0 <= theta <= math.pi / 2 + 1e-12:
        raise DomainError(f"mixing angle must lie in [0, pi/2], got {theta}")
    if total < 0:
        raise DomainError(f"block size must be non-negative, got {total}")
    w, v = np.linalg.eigh(generator_block(total))
    return (v * np.exp(-1j * theta * w)) @ v.T


def oracle_distribution(m: int, n: int, eta: float) -> np.ndarray:
    """Fusion outcome distribution from the dense block unitary.

    probs[s] = |<s, m+n-s| U(arccos eta) |m, n>|^2. Local phase conventions
    of the beamsplitter drop out of these squared magnitudes, so any valid
    sign convention for U yields the same distribution.

    Args:
        m: Photon number in the monitored input mode.
        n: Photon number in the other input mode.
        eta: Reflectivity in [0, 1].

    Returns:
        Array of length m+n+1 with probs[s].

    Raises:
        CapacityError: If m+n exceeds MATRIX_CAP.
    """
    _, m, n = _validate_counts(None, m, n)
    eta = _validate_eta(eta)
    if m + n > MATRIX_CAP:
        raise CapacityError(
            f"matrix route caps at m+n = {MATRIX_CAP}, got {m + n}"
        )
    u = beamsplitter_unitary(m + n, math.acos(eta))
    amps = u[:, m]
    return (amps * amps.conj()).real


def convolution_distribution(m: int, n: int, eta: float) -> np.ndarray:
    """Fusion outcome distribution from binomial operator expansion.

    Expands (eta a' + t b')^m and (t a' - eta b')^n with t = sqrt(1-eta^2),
    convolves the coefficient sequences over powers of a', and applies the
    sqrt(k!) normalizations. Independent of both the closed form and the
    matrix exponential.

    Args:
        m: Photon number in the monitored input mode.
        n: Photon number in the other input mode.
        eta: Reflectivity in [0, 1].

    Returns:
        Array of length m+n+1 with probs[s].

    Raises:
        CapacityError: If m+n exceeds CONVOLUTION_CAP.
    """
    _, m, n = _validate_counts(None, m, n)
    eta = _validate_eta(eta)
    if m + n > CONVOLUTION_CAP:
        raise CapacityError(
            f"convolution route caps at m+n = {CONVOLUTION_CAP}, got {m + n}"
        )
    t = math.sqrt(1.0 - eta * eta)
    a = np.array([math.comb(m, j) * eta**j * t ** (m - j) for j in range(m + 1)])
    b = np.array(
        [math.comb(n, k) * t**k * (-eta) ** (n - k) for k in range(n + 1)]
    )
    coeffs = np.convolve(a, b)
    total = m + n
    log_norm = 0.5 * (math.lgamma(m + 1) + math.lgamma(n + 1))
    probs = np.empty(total + 1)
    for s in range(total + 1):
        log_amp_scale = (
            0.5 * (math.lgamma(s + 1) + math.lgamma(total - s + 1)) - log_norm
        )
        amp = coeffs[s] * math.exp(log_amp_scale)
        probs[s] = amp * amp
    return probs
