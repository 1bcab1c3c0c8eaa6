"""Shared fixtures.

The scaling fixture is session-scoped because three acceptance checks
(scaling exponents, 20-photon improvement, source crossover) read the
same sweep; running it once keeps the suite inside its time budget.
"""

import time

import pytest

from fockfusion import engine, simulate

SCALING_D = tuple(range(6, 25, 2))
SCALING_MASTER_SEED = 97


def _steps_for(d: int) -> int:
    # deeper targets harvest rarely; spend more steps there
    return 30_000_000 if d >= 16 else 10_000_000


@pytest.fixture(scope="session")
def warm_engine():
    """Pay the one-time kernel compilation before any timed test."""
    config = simulate.SimConfig(d=2, strategy="balanced", steps=20_000, seed=3)
    simulate.run(config)
    simulate.reduce_state(3, 4, 2, 0.9)


@pytest.fixture(scope="session")
def scaling_runs(warm_engine):
    """Balanced and frugal recycled sweeps over d in [6, 24].

    Returns (runs, elapsed_seconds) where runs maps strategy ->
    [(d, RateEstimate)] in ascending d.
    """
    t0 = time.perf_counter()
    runs = {}
    for offset, strategy in ((0, "balanced"), (100, "frugal")):
        points = []
        for i, d in enumerate(SCALING_D):
            config = simulate.SimConfig(
                d=d,
                strategy=strategy,
                recycled=True,
                steps=_steps_for(d),
                seed=engine.derive_seed(SCALING_MASTER_SEED, offset + i),
            )
            points.append((d, simulate.run(config)))
        runs[strategy] = points
    return runs, time.perf_counter() - t0
