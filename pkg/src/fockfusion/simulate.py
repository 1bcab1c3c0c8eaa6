"""Bucket Markov process: strategies, rate estimation, state reduction.

The walk keeps one bucket per photon number holding the count of stored
states of that size, plus one designated source size x with an infinite
supply. Each step fuses a pair chosen by the strategy, samples the
detected photon number from the pair's outcome distribution at its
objective-optimal reflectivity, and returns the product to the buckets,
harvesting it (removing and counting) as soon as it reaches the target d.

Selection, stepping, and the full walk exist twice: readable Python
reference functions operating on a Buckets mapping (select_pair,
fusion_step), and the flat-array kernel in engine.py that the rate
estimator actually runs. Tests pin the two against each other.
"""

from __future__ import annotations

import math
import operator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import engine
from .errors import DomainError, FockFusionError
from .optimize import (
    NONRECYCLED_ZERO_LOSS,
    RECYCLED_GROW,
    EtaTableEntry,
    build_table,
    frugal_above,
    frugal_below,
)
from .probabilities import DEFAULT_POLICY, PrecisionPolicy, subtraction_distribution

__all__ = [
    "STRATEGIES",
    "Buckets",
    "SimConfig",
    "StepOutcome",
    "RateEstimate",
    "ReductionTrace",
    "select_pair",
    "fusion_step",
    "run",
    "rate_curve",
    "reduce_state",
    "eta_table_for",
]

STRATEGIES = ("balanced", "modesty", "random", "frugal")
_CODES = {name: code for code, name in enumerate(STRATEGIES)}


@dataclass
class Buckets:
    """Stored states per photon number, plus the infinite source size.

    counts maps photon number -> number of stored states; the bucket at
    source_size additionally has an unlimited supply behind it, so it is
    always available even at a stored count of zero.
    """

    counts: dict[int, int] = field(default_factory=dict)
    source_size: int = 1

    def stored(self, k: int) -> int:
        return self.counts.get(k, 0)

    def available(self, k: int) -> bool:
        return self.stored(k) >= 1 or k == self.source_size

    def pair_available(self, a: int, b: int) -> bool:
        if a == b:
            return self.stored(a) >= 2 or a == self.source_size
        return self.available(a) and self.available(b)

    def sizes(self) -> list[int]:
        """Available sizes, descending, source included."""
        out = {k for k, c in self.counts.items() if c >= 1 and k >= 1}
        out.add(self.source_size)
        return sorted(out, reverse=True)

    def consume(self, k: int) -> bool:
        """Remove one k-state, stored first. Returns True if a fresh source
        state was tapped (i.e. new photons entered the system)."""
        if self.stored(k) >= 1:
            self.counts[k] -= 1
            return False
        if k != self.source_size:
            raise DomainError(f"no {k}-photon state available")
        return True

    def add(self, k: int) -> None:
        self.counts[k] = self.counts.get(k, 0) + 1


@dataclass(frozen=True)
class SimConfig:
    """Configuration of one walk.

    Attributes:
        d: Target photon number, >= 2.
        strategy: balanced | modesty | random | frugal.
        recycled: Keep all fusion outcomes (True) or only s=0 (False).
        steps: Total fusion operations, including burn-in.
        burn_in: Steps discarded before rate accounting; default is 1% of
            steps with a floor of 10^4, capped at steps // 2.
        seed: 64-bit RNG seed (any int; masked to 64 bits).
        source_size: Photon number x of the infinite source bucket.
        d_prime: Frugal window top, d <= m+n <= d_prime; defaults to d.
        exact: Reduce harvested states above d down to exactly d and
            account the beamsplitter operations spent.
        eta_r: Reduction tap reflectivity; default sets the per-photon tap
            probability 1 - eta_r^2 to 0.05/(d-1).
        n_batches: Batch count for the batch-means standard error.
    """

    d: int
    strategy: str
    recycled: bool = True
    steps: int = 10_000_000
    burn_in: int | None = None
    seed: int = 1
    source_size: int = 1
    d_prime: int | None = None
    exact: bool = False
    eta_r: float | None = None
    n_batches: int = 20

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise DomainError(f"unknown strategy {self.strategy!r}")
        if operator.index(self.d) < 2:
            raise DomainError(f"target must be at least 2 photons, got {self.d}")
        if not 1 <= self.source_size <= self.d - 1:
            raise DomainError(
                f"source size must lie in [1, d-1], got {self.source_size}"
            )
        if self.steps < 1:
            raise DomainError("a run needs at least one step")
        if self.burn_in is not None and not 0 <= self.burn_in < self.steps:
            raise DomainError("burn-in must satisfy 0 <= burn_in < steps")
        if self.d_prime is not None and self.d_prime < self.d:
            raise DomainError("the frugal window requires d_prime >= d")
        if self.eta_r is not None and not 0.0 < self.eta_r < 1.0:
            raise DomainError("reduction reflectivity must lie in (0, 1)")
        if self.n_batches < 1:
            raise DomainError("need at least one batch")

    def effective_burn_in(self) -> int:
        if self.burn_in is not None:
            return self.burn_in
        return min(max(10_000, self.steps // 100), self.steps // 2)

    def effective_d_prime(self) -> int:
        return self.d if self.d_prime is None else self.d_prime

    def effective_p_tap(self) -> float:
        if self.eta_r is not None:
            return 1.0 - self.eta_r * self.eta_r
        return 0.05 / (self.d - 1)


@dataclass(frozen=True)
class StepOutcome:
    """Result of one fusion step: inputs, detection, product, harvest."""

    m: int
    n: int
    s: int
    result_size: int
    harvested: bool


@dataclass(frozen=True)
class RateEstimate:
    """Long-run preparation rate of one walk.

    rate = harvested / (steps - burn_in); stderr comes from batch means.
    The photon ledger fields (photons_in, detected, discarded, in_play,
    harvest_by_size) satisfy exact conservation and are checked after
    every run.
    """

    d: int
    strategy: str
    recycled: bool
    steps: int
    burn_in: int
    seed: int
    harvested: int
    rate: float
    stderr: float
    batch_rates: tuple[float, ...]
    photons_in: int
    detected: int
    discarded: int
    in_play: dict[int, int]
    harvest_by_size: dict[int, int]
    reduction_ops: int | None = None
    reduction_overshoots: int | None = None


@dataclass(frozen=True)
class ReductionTrace:
    """Outcome of trimming one state down to a target photon number."""

    ops: int
    final: int
    overshoot: bool


def select_pair(
    buckets: Buckets,
    strategy: str,
    d: int,
    *,
    d_prime: int | None = None,
    state: int = 0,
    rank: "dict[tuple[int, int], float] | None" = None,
) -> tuple[tuple[int, int], int]:
    """Choose the fusion pair for one step (reference implementation).

    balanced takes the largest size with two available states (the source
    size always qualifies). modesty fuses the largest available size with
    one source state. random draws two sizes uniformly from the available
    sizes, allowing a repeat only when two states of that size exist.
    frugal follows balanced until the equal pair would overshoot the
    window top d_prime (k > d_prime // 2), then picks the available pair
    with d <= m+n <= d_prime maximizing the frugal-above objective
    (`rank`, defaulting to the tabulated optima), falling back to the
    available pair with the largest total below d.

    Args:
        buckets: Current bucket contents.
        strategy: Strategy name.
        d: Target photon number.
        d_prime: Frugal window top; defaults to d.
        state: RNG state, consumed only by random.
        rank: Frugal-above ranking values per ordered pair (m >= n).

    Returns:
        ((m, n), new_state).
    """
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}")
    x = buckets.source_size
    sizes = buckets.sizes()

    if strategy == "modesty":
        return (sizes[0], x), state

    if strategy == "random":
        with np.errstate(over="ignore"):
            cands = sorted(sizes)
            state, u1 = engine.rng_uniform(np.uint64(state))
            k1 = cands[min(int(u1 * len(cands)), len(cands) - 1)]
            cands2 = [
                k
                for k in cands
                if (buckets.stored(k) - (1 if k == k1 else 0)) >= 1 or k == x
            ]
            state, u2 = engine.rng_uniform(np.uint64(state))
            k2 = cands2[min(int(u2 * len(cands2)), len(cands2) - 1)]
        return (k1, k2), int(state)

    balanced_k = x
    for k in sizes:
        if buckets.stored(k) >= 2 or k == x:
            balanced_k = k
            break
    if strategy == "balanced":
        return (balanced_k, balanced_k), state

    dp = d if d_prime is None else d_prime
    if balanced_k <= dp // 2:
        return (balanced_k, balanced_k), state
    if rank is None:
        side = d - 1
        table = build_table(frugal_above(d), side, side)
        rank = {pair: e.p_opt for pair, e in table.items()}
    best: tuple[int, int] | None = None
    best_val = -1.0
    for a in range(d - 1, 0, -1):
        for b in range(a, 0, -1):
            if not d <= a + b <= dp:
                continue
            if buckets.pair_available(a, b) and rank.get((a, b), 0.0) > best_val:
                best_val = rank[(a, b)]
                best = (a, b)
    if best is not None:
        return best, state
    best_sum = -1
    for a in range(d - 1, 0, -1):
        for b in range(a, 0, -1):
            if a + b >= d or a + b <= best_sum:
                continue
            if buckets.pair_available(a, b):
                best_sum = a + b
                best = (a, b)
    if best is not None:
        return best, state
    return (x, x), state


def _pair_cdf(
    m: int, n: int, eta: float, policy: PrecisionPolicy
) -> np.ndarray:
    dist = subtraction_distribution(m, n, eta, policy=policy)
    return np.cumsum(dist.probs)


def eta_table_for(
    strategy: str,
    recycled: bool,
    d: int,
    d_prime: int,
    *,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    cache_dir: str | None = None,
    use_cache: bool = True,
) -> dict[tuple[int, int], EtaTableEntry]:
    """Optimal-eta entries for every ordered pair (m >= n) a walk can fuse.

    Recycled walks draw from the recycled-grow table; non-recycled walks
    (any strategy, since only s=0 survives) from nonrecycled-zero-loss;
    recycled frugal walks use frugal-above-target for pairs reaching d and
    frugal-below-target for the rest.
    """
    side = d - 1
    kw = dict(policy=policy, cache_dir=cache_dir, use_cache=use_cache)
    if strategy == "frugal" and recycled:
        table = dict(build_table(frugal_above(d), side, side, **kw))
        if any(m + n < d for m in range(1, side + 1) for n in range(1, m + 1)):
            table.update(build_table(frugal_below(d), side, side, **kw))
        return table
    obj = RECYCLED_GROW if recycled else NONRECYCLED_ZERO_LOSS
    return build_table(obj, side, side, **kw)


def _kernel_tables(
    config: SimConfig,
    policy: PrecisionPolicy,
    cache_dir: str | None,
    use_cache: bool,
) -> tuple[np.ndarray, np.ndarray]:
    """Flat per-pair CDF and frugal ranking arrays for the walk kernel."""
    d = config.d
    stride = 2 * d
    etas = eta_table_for(
        config.strategy,
        config.recycled,
        d,
        config.effective_d_prime(),
        policy=policy,
        cache_dir=cache_dir,
        use_cache=use_cache,
    )
    cdf = np.zeros(d * d * stride)
    p_above = np.zeros(d * d)
    for m in range(1, d):
        for n in range(1, m + 1):
            entry = etas[(m, n)]
            row = _pair_cdf(m, n, entry.eta_opt, policy)
            base = (m * d + n) * stride
            cdf[base : base + len(row)] = row
            if config.strategy == "frugal" and m + n >= d:
                if config.recycled:
                    p_above[m * d + n] = entry.p_opt
                else:
                    # Without recycling the chance of reaching d is the
                    # zero-loss probability at the pair's optimum.
                    p_above[m * d + n] = row[0]
    return cdf, p_above


def fusion_step(
    state: int,
    buckets: Buckets,
    config: SimConfig,
    *,
    etas: dict[tuple[int, int], EtaTableEntry] | None = None,
    policy: PrecisionPolicy = DEFAULT_POLICY,
) -> tuple[StepOutcome, int]:
    """One fusion step on a Buckets mapping (reference implementation).

    Selects a pair, consumes the inputs (stored states before source
    taps), samples the detected count s, and either harvests the product
    (result >= d), stores it, or discards it (non-recycled, s > 0).

    Returns:
        (StepOutcome, new RNG state).
    """
    if etas is None:
        etas = eta_table_for(
            config.strategy,
            config.recycled,
            config.d,
            config.effective_d_prime(),
            policy=policy,
        )
    rank = {pair: e.p_opt for pair, e in etas.items() if pair[0] + pair[1] >= config.d}
    (m, n), state = select_pair(
        buckets,
        config.strategy,
        config.d,
        d_prime=config.effective_d_prime(),
        state=state,
        rank=rank,
    )
    buckets.consume(m)
    buckets.consume(n)
    hi, lo = (m, n) if m >= n else (n, m)
    row = _pair_cdf(hi, lo, etas[(hi, lo)].eta_opt, policy)
    with np.errstate(over="ignore"):
        state, u = engine.rng_uniform(np.uint64(state))
    s = m + n
    for si in range(m + n + 1):
        if u < row[si]:
            s = si
            break
    size = m + n - s
    harvested = False
    if not config.recycled and s > 0:
        pass
    elif size >= config.d:
        harvested = True
    else:
        buckets.add(size)
    return StepOutcome(m, n, s, size, harvested), int(state)


def run(
    config: SimConfig,
    *,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    cache_dir: str | None = None,
    use_cache: bool = True,
) -> RateEstimate:
    """Estimate the preparation rate of one walk.

    Deterministic for a given config: identical configs produce identical
    RateEstimates bit for bit, on both the JIT and pure-Python engine
    paths. Photon conservation (source taps = detected + discarded +
    stored + harvested photons) is verified before returning.

    Args:
        config: Walk configuration.
        policy: Precision policy for distributions and eta tables.
        cache_dir: Eta table cache directory override.
        use_cache: Whether eta tables may be memoized or read from disk.

    Returns:
        The RateEstimate.
    """
    d = config.d
    burn_in = config.effective_burn_in()
    measured = config.steps - burn_in
    batch_size = max(1, measured // config.n_batches)
    cdf, p_above = _kernel_tables(config, policy, cache_dir, use_cache)

    counts = np.zeros(d, np.int64)
    harvest_by_size = np.zeros(2 * d, np.int64)
    batch_harvest = np.zeros(config.n_batches, np.int64)
    stats = np.zeros(4, np.int64)
    state_out = np.zeros(1, np.uint64)

    with np.errstate(over="ignore"):
        engine.walk(
            np.uint64(config.seed & engine.MASK64),
            config.steps,
            burn_in,
            d,
            _CODES[config.strategy],
            1 if config.recycled else 0,
            config.source_size,
            config.effective_d_prime(),
            cdf,
            p_above,
            counts,
            harvest_by_size,
            batch_harvest,
            batch_size,
            stats,
            state_out,
        )

    harvested = int(stats[0])
    photons_in = int(stats[1])
    detected = int(stats[2])
    discarded = int(stats[3])
    stored = int(np.sum(np.arange(d, dtype=np.int64) * counts))
    harvested_photons = int(
        np.sum(np.arange(2 * d, dtype=np.int64) * harvest_by_size)
    )
    if photons_in != detected + discarded + stored + harvested_photons:
        raise FockFusionError(
            "photon conservation violated: "
            f"in={photons_in} detected={detected} discarded={discarded} "
            f"stored={stored} harvested={harvested_photons}"
        )

    rate = harvested / measured if measured > 0 else 0.0
    batch_rates = batch_harvest / batch_size
    if config.n_batches >= 2:
        stderr = float(
            np.std(batch_rates, ddof=1) / math.sqrt(config.n_batches)
        )
    else:
        stderr = 0.0

    reduction_ops = None
    reduction_overshoots = None
    if config.exact:
        p_tap = config.effective_p_tap()
        state = state_out[0]
        total_ops = 0
        overshoots = 0
        with np.errstate(over="ignore"):
            for size in range(d + 1, 2 * d):
                for _ in range(int(harvest_by_size[size])):
                    state, ops, final = engine.reduce_walk(
                        state, size, d, p_tap, 10_000_000
                    )
                    total_ops += int(ops)
                    if final < d:
                        overshoots += 1
        reduction_ops = total_ops
        reduction_overshoots = overshoots

    return RateEstimate(
        d=d,
        strategy=config.strategy,
        recycled=config.recycled,
        steps=config.steps,
        burn_in=burn_in,
        seed=config.seed,
        harvested=harvested,
        rate=rate,
        stderr=stderr,
        batch_rates=tuple(float(r) for r in batch_rates),
        photons_in=photons_in,
        detected=detected,
        discarded=discarded,
        in_play={k: int(c) for k, c in enumerate(counts) if c},
        harvest_by_size={k: int(c) for k, c in enumerate(harvest_by_size) if c},
        reduction_ops=reduction_ops,
        reduction_overshoots=reduction_overshoots,
    )


def _curve_worker(args: tuple) -> tuple[int, RateEstimate]:
    config, policy, cache_dir, use_cache = args
    return config.d, run(
        config, policy=policy, cache_dir=cache_dir, use_cache=use_cache
    )


def rate_curve(
    d_values: "list[int]",
    template: SimConfig,
    *,
    workers: int = 1,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    cache_dir: str | None = None,
    use_cache: bool = True,
) -> list[tuple[int, RateEstimate]]:
    """One run per target d, with child seeds derived from the template's.

    Args:
        d_values: Targets, strictly ascending.
        template: Configuration reused for every run; its seed acts as the
            master seed and its d is ignored.
        workers: Process count for parallel runs (1 = in-process).

    Returns:
        [(d, RateEstimate)] in d order.
    """
    if list(d_values) != sorted(set(d_values)):
        raise DomainError("d values must be strictly ascending")
    configs = [
        replace(template, d=d, seed=engine.derive_seed(template.seed, i))
        for i, d in enumerate(d_values)
    ]
    jobs = [(c, policy, cache_dir, use_cache) for c in configs]
    if workers <= 1:
        results = [_curve_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_curve_worker, jobs))
    return results


def reduce_state(
    seed: int,
    n_start: int,
    d: int,
    eta_r: float | None = None,
    *,
    max_ops: int = 10_000_000,
) -> ReductionTrace:
    """Trim an n_start-photon state down to d with a weak tap beamsplitter.

    Args:
        seed: RNG seed.
        n_start: Starting photon number, >= d.
        d: Target photon number.
        eta_r: Tap reflectivity; per-photon tap probability is 1 - eta_r^2.
            Defaults to n_start * p_tap = 0.1.
        max_ops: Safety cap on beamsplitter operations.

    Returns:
        ReductionTrace(ops, final, overshoot).
    """
    n_start = operator.index(n_start)
    d = operator.index(d)
    if n_start < d:
        raise DomainError(f"cannot reduce {n_start} photons up to {d}")
    if eta_r is None:
        p_tap = 0.1 / max(n_start, 1)
    else:
        if not 0.0 < eta_r < 1.0:
            raise DomainError("reduction reflectivity must lie in (0, 1)")
        p_tap = 1.0 - eta_r * eta_r
    with np.errstate(over="ignore"):
        _, ops, final = engine.reduce_walk(
            np.uint64(seed & engine.MASK64), n_start, d, p_tap, max_ops
        )
    return ReductionTrace(int(ops), int(final), bool(final < d))
