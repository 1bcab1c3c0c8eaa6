"""Reference schemes: doubling, limited recycling, single-shot, thermal sources."""

import math

import pytest

from fockfusion.baselines import (
    LIMITED_RECYCLING_EXPONENT,
    doubling_estimate,
    doubling_expected_fusions,
    doubling_expected_singles,
    doubling_stirling_form,
    limited_recycling_expected_singles,
    limited_recycling_scaling,
    limited_recycling_success,
    next_power_of_two,
    single_shot_pbunch,
    single_shot_rate,
    spdc_lambda_sq,
    spdc_pprep,
)
from fockfusion.errors import DomainError


def test_next_power_of_two():
    assert [next_power_of_two(d) for d in (1, 2, 3, 4, 5, 8, 9)] == [
        1, 2, 4, 4, 8, 8, 16,
    ]


def test_doubling_cost_small_targets():
    # growing 2 photons succeeds half the time: 2 singles / (1/2) = 4,
    # then 4 photons: (2*4) / P0(2) = 8 / (3/8) = 64/3
    assert doubling_expected_singles(2) == pytest.approx(4.0, rel=1e-12)
    assert doubling_expected_singles(4) == pytest.approx(64.0 / 3.0, rel=1e-12)
    # fusions follow f(2k) = (1 + 2 f(k)) / P0(k)
    assert doubling_expected_fusions(2) == pytest.approx(2.0, rel=1e-12)
    assert doubling_expected_fusions(4) == pytest.approx(40.0 / 3.0, rel=1e-12)


def test_doubling_rounds_up_to_power_of_two():
    est = doubling_estimate(5)
    assert est.d_requested == 5 and est.d_used == 8
    assert est.expected_singles == pytest.approx(doubling_expected_singles(8), rel=1e-12)


def test_doubling_stirling_ratio_constant():
    est = doubling_estimate(1024)
    # exact cost over the closed Stirling form settles near 1.2774
    assert est.stirling_ratio == pytest.approx(1.2774134849989496, rel=1e-10)
    assert doubling_stirling_form(1024) > 0.0


def test_limited_recycling_success_known_values():
    assert limited_recycling_success(1) == pytest.approx(0.5, abs=1e-15)
    assert limited_recycling_success(2) == pytest.approx(0.375, abs=1e-15)
    assert limited_recycling_success(4) == pytest.approx(0.4296875, abs=1e-15)
    assert limited_recycling_success(200) == pytest.approx(
        0.3356217592750123, abs=1e-13
    )


def test_limited_recycling_tends_to_one_third():
    third = 1.0 / 3.0
    assert abs(limited_recycling_success(400) - third) < abs(
        limited_recycling_success(50) - third
    )
    assert 0.30 <= limited_recycling_success(400) <= 0.36


def test_limited_recycling_scaling_exponent():
    assert LIMITED_RECYCLING_EXPONENT == pytest.approx(
        math.log(6.0) / math.log(1.5), rel=1e-15
    )
    assert limited_recycling_scaling(2) == pytest.approx(
        2.0**LIMITED_RECYCLING_EXPONENT, rel=1e-12
    )
    with pytest.raises(DomainError):
        limited_recycling_scaling(1)


def test_limited_recycling_ladder():
    est = limited_recycling_expected_singles(2)
    # one fusion of two singles at success 1/2: four singles expected
    assert est.d_reached == 2
    assert est.expected_singles == pytest.approx(4.0, rel=1e-12)
    big = limited_recycling_expected_singles(1024)
    assert big.d_reached >= 1024
    assert big.expected_singles == pytest.approx(1151219561745.796, rel=1e-9)
    # far cheaper than repeated doubling at the same depth
    assert big.expected_singles < doubling_expected_singles(1024)


def test_single_shot_known_values():
    assert single_shot_pbunch(2) == pytest.approx(0.5, rel=1e-12)
    assert single_shot_pbunch(3) == pytest.approx(6.0 / 27.0, rel=1e-12)
    assert single_shot_rate(2) == pytest.approx(0.25, rel=1e-12)
    assert single_shot_rate(3) == pytest.approx(6.0 / 81.0, rel=1e-12)
    # stays finite and positive far beyond factorial overflow territory
    assert 0.0 < single_shot_rate(400) < 1e-100


def test_spdc_thermal_statistics():
    nbar = 0.8
    # photon-number weights form a normalized geometric series
    total = sum(spdc_lambda_sq(nbar, n) for n in range(200))
    assert total == pytest.approx(1.0, abs=1e-12)
    assert spdc_pprep(1.0, 2) == pytest.approx(0.25, rel=1e-12)
    # deeper targets are exponentially harder
    assert spdc_pprep(0.8, 20) < spdc_pprep(0.8, 10) < spdc_pprep(0.8, 5)


def test_baseline_domain_validation():
    with pytest.raises(DomainError):
        doubling_expected_singles(0)
    with pytest.raises(DomainError):
        limited_recycling_success(0)
    with pytest.raises(DomainError):
        single_shot_rate(0)
    with pytest.raises(DomainError):
        spdc_pprep(-0.5, 4)
