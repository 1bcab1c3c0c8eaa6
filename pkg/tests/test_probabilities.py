"""Closed-form subtraction probabilities and the precision ladder."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockfusion.errors import DomainError
from fockfusion.probabilities import (
    PrecisionPolicy,
    binomial,
    log_factorial,
    p_grow,
    p_sub,
    p_sub_equal_balanced,
    p_sub_exact,
    subtraction_distribution,
)

ROOT_HALF = 1.0 / math.sqrt(2.0)


def test_binomial_known_values():
    assert binomial(0, 0) == 1
    assert binomial(5, 2) == 10
    assert binomial(60, 30) == 118264581564861424  # == math.comb(60, 30)
    with pytest.raises(DomainError):
        binomial(5, 6)
    with pytest.raises(DomainError):
        binomial(3, -1)


def test_log_factorial_matches_lgamma():
    for k in (0, 1, 2, 10, 170, 1000):
        assert log_factorial(k) == pytest.approx(math.lgamma(k + 1), rel=1e-14)


def test_hom_bunching_is_exact():
    # two photons on a balanced splitter never split
    assert p_sub(0, 1, 1, ROOT_HALF) == 0.5
    assert p_sub(1, 1, 1, ROOT_HALF) == 0.0
    assert p_sub(2, 1, 1, ROOT_HALF) == 0.5


def test_vacuum_input_reduces_to_binomial_thinning():
    eta = 0.6
    u = eta * eta
    for m in range(1, 7):
        dist = subtraction_distribution(m, 0, eta)
        for s in range(m + 1):
            expected = binomial(m, s) * u**s * (1.0 - u) ** (m - s)
            assert dist.probs[s] == pytest.approx(expected, abs=1e-12)
    # single photon: detecting it has probability eta^2
    assert p_sub(0, 1, 0, 0.6) == pytest.approx(0.64, abs=1e-12)
    assert p_sub(1, 1, 0, 0.6) == pytest.approx(0.36, abs=1e-12)


def test_exact_rational_path_on_snapped_eta():
    # eta = 1/sqrt(2) snaps to u = 1/2 and goes through Fraction arithmetic
    val = p_sub_exact(0, 3, 2, Fraction(1, 2))
    assert isinstance(val, Fraction)
    dist = subtraction_distribution(3, 2, ROOT_HALF)
    assert dist.probs[0] == pytest.approx(float(val), abs=1e-15)


def test_balanced_equal_closed_form_rational():
    for n in (1, 2, 5, 17, 50):
        got = p_sub_exact(0, n, n, Fraction(1, 2))
        want = Fraction(math.factorial(2 * n), 4**n * math.factorial(n) ** 2)
        assert got == want


def test_balanced_equal_float_helper():
    for n in (1, 2, 5, 17, 50):
        want = math.factorial(2 * n) / (4**n * math.factorial(n) ** 2)
        assert p_sub_equal_balanced(n) == pytest.approx(want, rel=1e-12)
    # large-n tail approaches 1/sqrt(pi n)
    assert p_sub_equal_balanced(200) * math.sqrt(200 * math.pi) == pytest.approx(
        1.0, abs=2e-3
    )


def test_distribution_fields_and_support():
    dist = subtraction_distribution(3, 2, 0.6)
    assert dist.m == 3 and dist.n == 2
    assert len(dist.probs) == 6
    assert float(dist.probs.sum()) == pytest.approx(1.0, abs=1e-12)
    assert (dist.probs >= 0.0).all()


def test_endpoint_etas_are_deterministic():
    # eta = 0: everything reflects into the detector from one arm
    d0 = subtraction_distribution(2, 3, 0.0)
    assert d0.probs[3] == pytest.approx(1.0, abs=1e-12)
    # eta = 1: the monitored arm keeps its photons
    d1 = subtraction_distribution(2, 3, 1.0)
    assert d1.probs[2] == pytest.approx(1.0, abs=1e-12)


def test_grow_probability_sums_low_outcomes():
    m, n, eta = 4, 3, 0.55
    dist = subtraction_distribution(m, n, eta)
    want = float(dist.probs[: min(m, n)].sum())
    assert p_grow(m, n, eta, True) == pytest.approx(want, rel=1e-12)
    # without recycling only the lossless outcome grows the register
    assert p_grow(m, n, eta, False) == pytest.approx(float(dist.probs[0]), rel=1e-12)
    with pytest.raises(DomainError):
        p_grow(0, 3, eta, True)


def test_domain_validation():
    with pytest.raises(DomainError):
        p_sub(0, -1, 2, 0.5)
    with pytest.raises(DomainError):
        p_sub(-1, 1, 2, 0.5)
    with pytest.raises(DomainError):
        p_sub(0, 1, 2, 1.5)
    with pytest.raises(DomainError):
        p_sub(0, 1, 2, float("nan"))
    with pytest.raises(DomainError):
        subtraction_distribution(1, 2, -0.1)


def test_policy_working_digits_scale_with_total():
    policy = PrecisionPolicy()
    assert policy.working_digits(10) == policy.digits
    # cancellation eats about 0.3 digits per photon, so grow with m+n
    assert policy.working_digits(400) > policy.digits + 100


def test_high_precision_path_consistency():
    # above the float-path cutoff the mpmath path must still normalize
    # and agree with the float path at the boundary
    policy_low = PrecisionPolicy(switch_threshold=10)
    for m, n in ((8, 8), (13, 9)):
        a = subtraction_distribution(m, n, 0.37).probs
        b = subtraction_distribution(m, n, 0.37, policy=policy_low).probs
        assert np.abs(a - b).max() < 1e-11


@settings(max_examples=60, deadline=None)
@given(
    m=st.integers(min_value=0, max_value=12),
    n=st.integers(min_value=0, max_value=12),
    eta=st.floats(min_value=0.01, max_value=0.99),
)
def test_property_normalized_and_nonnegative(m, n, eta):
    dist = subtraction_distribution(m, n, eta)
    assert len(dist.probs) == m + n + 1
    assert (dist.probs >= 0.0).all()
    assert float(dist.probs.sum()) == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(
    m=st.integers(min_value=0, max_value=10),
    n=st.integers(min_value=0, max_value=10),
    eta=st.floats(min_value=0.05, max_value=0.95),
)
def test_property_swap_mirror_symmetry(m, n, eta):
    # swapping the inputs mirrors the stay probability u -> 1-u
    mirror = math.sqrt(1.0 - eta * eta)
    a = subtraction_distribution(m, n, eta).probs
    b = subtraction_distribution(n, m, mirror).probs
    assert np.abs(a - b).max() < 1e-10


@settings(max_examples=40, deadline=None)
@given(
    m=st.integers(min_value=1, max_value=8),
    s=st.integers(min_value=0, max_value=8),
    num=st.integers(min_value=1, max_value=15),
)
def test_property_exact_path_matches_float(m, s, num):
    u = Fraction(num, 16)
    if s > 2 * m:
        s = 2 * m
    exact = float(p_sub_exact(s, m, m, u))
    # snap_denominator=1 keeps u off the rational shortcut
    no_snap = PrecisionPolicy(snap_denominator=1)
    approx = p_sub(s, m, m, math.sqrt(num / 16), policy=no_snap)
    assert approx == pytest.approx(exact, abs=1e-10)
