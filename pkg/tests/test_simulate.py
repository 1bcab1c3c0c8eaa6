"""Walk semantics: pair selection, fusion steps, rates, reduction."""

import math

import numpy as np
import pytest

from fockfusion import engine, simulate
from fockfusion.errors import DomainError
from fockfusion.simulate import Buckets, SimConfig


def _buckets(counts, source_size=1):
    return Buckets(counts=dict(counts), source_size=source_size)


# ------------------------------------------------------------ Buckets


def test_source_bucket_is_never_exhausted():
    b = _buckets({})
    assert b.available(1)
    assert b.pair_available(1, 1)
    assert b.consume(1) is True  # tapping the source reports new photons
    assert b.stored(1) == 0


def test_consume_prefers_stored_states():
    b = _buckets({1: 2})
    assert b.consume(1) is False  # stored state, no new photons
    assert b.stored(1) == 1
    b.consume(1)
    assert b.consume(1) is True  # now tapping the source
    with pytest.raises(DomainError):
        _buckets({}).consume(3)


def test_sizes_listing():
    b = _buckets({4: 2, 2: 1, 7: 0})
    assert b.sizes() == [4, 2, 1]


# ----------------------------------------------------------- SimConfig


def test_config_validation():
    good = dict(d=4, strategy="balanced")
    SimConfig(**good)
    with pytest.raises(DomainError):
        SimConfig(d=4, strategy="greedy")
    with pytest.raises(DomainError):
        SimConfig(d=1, strategy="balanced")
    with pytest.raises(DomainError):
        SimConfig(d=4, strategy="balanced", source_size=0)
    with pytest.raises(DomainError):
        SimConfig(d=4, strategy="balanced", source_size=4)
    with pytest.raises(DomainError):
        SimConfig(d=4, strategy="balanced", steps=0)
    with pytest.raises(DomainError):
        SimConfig(d=4, strategy="balanced", steps=100, burn_in=100)
    with pytest.raises(DomainError):
        SimConfig(d=4, strategy="balanced", d_prime=3)
    with pytest.raises(DomainError):
        SimConfig(d=4, strategy="balanced", eta_r=1.0)
    with pytest.raises(DomainError):
        SimConfig(d=4, strategy="balanced", n_batches=0)


def test_effective_burn_in_rules():
    assert SimConfig(d=4, strategy="balanced", steps=1_000_000).effective_burn_in() == 10_000
    assert SimConfig(d=4, strategy="balanced", steps=4_000_000).effective_burn_in() == 40_000
    # the floor may not eat more than half a short run
    assert SimConfig(d=4, strategy="balanced", steps=10_000).effective_burn_in() == 5_000
    assert SimConfig(d=4, strategy="balanced", steps=100, burn_in=7).effective_burn_in() == 7


def test_effective_tap_probability():
    c = SimConfig(d=6, strategy="balanced")
    assert c.effective_p_tap() == pytest.approx(0.05 / 5)
    c = SimConfig(d=6, strategy="balanced", eta_r=0.9)
    assert c.effective_p_tap() == pytest.approx(1.0 - 0.81)


# ---------------------------------------------------------- select_pair


def test_balanced_takes_source_pair_when_empty():
    (m, n), _ = simulate.select_pair(_buckets({}), "balanced", 4)
    assert (m, n) == (1, 1)


def test_balanced_takes_largest_available_pair():
    b = _buckets({2: 1, 4: 2})
    (m, n), _ = simulate.select_pair(b, "balanced", 8)
    assert (m, n) == (4, 4)


def test_balanced_skips_sizes_without_a_pair():
    # one stored 3-state cannot pair with itself; the source single can
    b = _buckets({3: 1})
    (m, n), _ = simulate.select_pair(b, "balanced", 8)
    assert (m, n) == (1, 1)


def test_modesty_fuses_largest_with_source():
    b = _buckets({3: 1, 2: 2})
    (m, n), _ = simulate.select_pair(b, "modesty", 8)
    assert (m, n) == (3, 1)


def test_frugal_below_window_follows_balanced():
    b = _buckets({2: 2})
    pair, _ = simulate.select_pair(b, "frugal", 10, d_prime=10)
    assert pair == (2, 2)


def test_frugal_avoids_overshooting_the_window():
    # the balanced choice (6,6) lands above d' = 10; no available pair
    # reaches the window, so fall back to the largest total below d
    b = _buckets({6: 2})
    pair, _ = simulate.select_pair(b, "frugal", 10, d_prime=10)
    assert pair == (6, 1)


def test_frugal_prefers_in_window_pairs():
    b = _buckets({6: 2, 4: 1})
    pair, _ = simulate.select_pair(b, "frugal", 10, d_prime=10)
    assert tuple(sorted(pair, reverse=True)) == (6, 4)


def test_random_strategy_consumes_rng_state():
    b = _buckets({2: 2, 3: 2})
    seen = set()
    state = 7
    for _ in range(64):
        pair, state = simulate.select_pair(b, "random", 9, state=state)
        seen.add(tuple(sorted(pair)))
    # uniform over available sizes reaches every combination
    assert {(1, 1), (2, 2), (3, 3), (1, 2), (1, 3), (2, 3)} <= seen


def test_random_repeat_needs_two_states():
    b = _buckets({5: 1})
    state = 3
    for _ in range(64):
        pair, state = simulate.select_pair(b, "random", 9, state=state)
        assert tuple(sorted(pair)) in {(1, 1), (1, 5)}


# ---------------------------------------------------------- fusion_step


def test_two_singles_never_split_on_balanced_tap():
    # the (1,1) fusion at its optimum is the bunching interferometer:
    # the detector sees 0 or 2 photons, never 1
    config = SimConfig(d=2, strategy="balanced", recycled=True)
    state = 5
    outcomes = set()
    for _ in range(200):
        b = _buckets({})
        out, state = simulate.fusion_step(state, b, config)
        outcomes.add(out.s)
        if out.s == 0:
            assert out.harvested and out.result_size == 2
        else:
            # bunched pair lost to the detector; an inert vacuum record
            assert b.stored(0) == 1
    assert outcomes == {0, 2}


def test_nonrecycled_step_discards_lossy_outcomes():
    config = SimConfig(d=2, strategy="balanced", recycled=False)
    state = 1
    saw_discard = False
    for _ in range(200):
        b = _buckets({})
        out, state = simulate.fusion_step(state, b, config)
        if out.s > 0:
            saw_discard = True
            assert not out.harvested
            assert b.sizes() == [1]  # nothing stored, nothing harvested
            assert b.stored(0) == 0
    assert saw_discard


def test_recycled_step_stores_partial_losses():
    config = SimConfig(d=6, strategy="balanced", recycled=True)
    state = 2
    saw_partial = False
    for _ in range(500):
        b = _buckets({4: 2})
        out, state = simulate.fusion_step(state, b, config)
        assert out.m == 4 and out.n == 4
        if out.s >= 3:
            saw_partial = True
            # the (8-s)-photon remainder goes back into play
            assert b.stored(8 - out.s) == 1
            assert not out.harvested
        else:
            assert out.harvested  # 8-s >= d for s <= 2
    assert saw_partial


def test_fusion_step_consumes_stored_before_source():
    config = SimConfig(d=8, strategy="balanced", recycled=True)
    b = _buckets({1: 2})
    out, _ = simulate.fusion_step(11, b, config)
    assert (out.m, out.n) == (1, 1)
    assert b.stored(1) == 0  # both stored singles consumed, no source tap


# ------------------------------------------------------------------ run


def test_run_reproducible_and_ledgered():
    config = SimConfig(d=3, strategy="balanced", steps=60_000, seed=123)
    a = simulate.run(config)
    b = simulate.run(config)
    assert a == b
    assert a.rate == a.harvested / (a.steps - a.burn_in)
    assert len(a.batch_rates) == config.n_batches
    assert a.stderr >= 0.0


def test_run_photon_conservation_ledger():
    for recycled in (True, False):
        config = SimConfig(
            d=4, strategy="balanced", recycled=recycled, steps=50_000, seed=9
        )
        est = simulate.run(config)
        in_play = sum(k * c for k, c in est.in_play.items())
        harvested = sum(k * c for k, c in est.harvest_by_size.items())
        assert est.photons_in == est.detected + est.discarded + in_play + harvested
        if recycled:
            assert est.discarded == 0


def test_run_bounded_memory_of_stored_sizes():
    config = SimConfig(d=5, strategy="balanced", steps=50_000, seed=31)
    est = simulate.run(config)
    assert all(0 <= k < 5 for k in est.in_play)
    assert all(c >= 0 for c in est.in_play.values())


def test_nonrecycled_balanced_harvests_only_doubled_sizes():
    # without recycling, balanced growth only ever doubles: products are
    # powers of two, so targets 3 and 4 harvest the same 4-photon states
    for d in (3, 4):
        config = SimConfig(d=d, strategy="balanced", recycled=False, steps=50_000, seed=5)
        est = simulate.run(config)
        assert set(est.harvest_by_size) == {4}


def test_two_photon_target_rate_is_one_half(warm_engine):
    config = SimConfig(d=2, strategy="balanced", steps=200_000, seed=17)
    est = simulate.run(config)
    assert abs(est.rate - 0.5) <= 3.0 * est.stderr


def test_nonrecycled_doubling_cost_matches_expectation():
    # 4-photon preparation without recycling costs 64/3 singles on average
    config = SimConfig(d=4, strategy="balanced", recycled=False, steps=1_000_000, seed=29)
    est = simulate.run(config)
    harvests = sum(est.harvest_by_size.values())
    ratio = est.photons_in / harvests
    assert ratio == pytest.approx(64.0 / 3.0, rel=0.15)


def test_exact_mode_reduces_overshoot_harvests():
    config = SimConfig(
        d=3, strategy="balanced", recycled=True, steps=60_000, seed=41, exact=True
    )
    est = simulate.run(config)
    assert est.reduction_ops is not None and est.reduction_ops > 0
    assert est.reduction_overshoots is not None
    plain = simulate.run(
        SimConfig(d=3, strategy="balanced", recycled=True, steps=60_000, seed=41)
    )
    assert plain.reduction_ops is None


# ------------------------------------------------------------ rate_curve


def test_rate_curve_seeds_and_order():
    template = SimConfig(d=2, strategy="balanced", steps=40_000, seed=55)
    curve = simulate.rate_curve([2, 3, 4], template)
    assert [d for d, _ in curve] == [2, 3, 4]
    for i, (d, est) in enumerate(curve):
        assert est.d == d
        assert est.seed == engine.derive_seed(55, i)
    with pytest.raises(DomainError):
        simulate.rate_curve([4, 2], template)
    with pytest.raises(DomainError):
        simulate.rate_curve([2, 2, 3], template)


def test_rate_curve_decreases_with_target(warm_engine):
    template = SimConfig(d=2, strategy="balanced", steps=300_000, seed=71)
    curve = dict(simulate.rate_curve([4, 8, 16], template))
    for lo, hi in ((4, 8), (8, 16)):
        gap = curve[lo].rate - curve[hi].rate
        sigma = math.hypot(curve[lo].stderr, curve[hi].stderr)
        assert gap > 3.0 * sigma


def test_frugal_beats_balanced_at_deep_targets(warm_engine):
    kw = dict(d=16, recycled=True, steps=300_000, seed=83)
    balanced = simulate.run(SimConfig(strategy="balanced", **kw))
    frugal = simulate.run(SimConfig(strategy="frugal", **kw))
    gap = frugal.rate - balanced.rate
    assert gap > 3.0 * math.hypot(frugal.stderr, balanced.stderr)


# ---------------------------------------------------------- reduce_state


def test_reduce_state_deterministic_and_validated():
    a = simulate.reduce_state(7, 12, 10, 0.995)
    b = simulate.reduce_state(7, 12, 10, 0.995)
    assert a == b
    assert a.ops >= 1
    assert a.overshoot == (a.final < 10)
    with pytest.raises(DomainError):
        simulate.reduce_state(7, 9, 10)
    with pytest.raises(DomainError):
        simulate.reduce_state(7, 12, 10, eta_r=1.0)


def test_reduce_state_single_photon_cost():
    # one excess photon, tap probability p = 0.05: retrying overshoots
    # until a clean single subtraction lands costs 1/(11 p (1-p)^10)
    # operations on average
    d, p_tap = 10, 0.05
    eta_r = math.sqrt(1.0 - p_tap)
    want = 1.0 / ((d + 1) * p_tap * (1.0 - p_tap) ** d)
    total_ops = 0
    successes = 0
    trials = 0
    while successes < 3000:
        trace = simulate.reduce_state(engine.derive_seed(13, trials), d + 1, d, eta_r)
        trials += 1
        total_ops += trace.ops
        if not trace.overshoot:
            successes += 1
    got = total_ops / successes
    assert got == pytest.approx(want, rel=0.08)
