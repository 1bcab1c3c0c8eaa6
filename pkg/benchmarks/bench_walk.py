"""Throughput of the walk kernel on the JIT and pure-Python paths.

Each path runs in its own interpreter because the engine picks its
implementation at import time from FOCKFUSION_NUMBA. The child warms the
kernel on a short run first so compilation stays out of the timing.

Usage: python3 benchmarks/bench_walk.py [--d 12] [--steps 3000000]
"""

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
from fockfusion import engine, simulate

d, steps = json.loads(sys.argv[1])
warm = simulate.SimConfig(d=d, strategy="balanced", steps=50_000, seed=1)
simulate.run(warm)  # compile + eta table load

config = simulate.SimConfig(d=d, strategy="balanced", steps=steps, seed=1)
t0 = time.perf_counter()
est = simulate.run(config)
elapsed = time.perf_counter() - t0
print(json.dumps({
    "jit": engine.JIT_ENABLED,
    "steps": steps,
    "seconds": elapsed,
    "rate": est.rate,
    "harvested": est.harvested,
}))
"""


def run_child(numba_flag: str, d: int, steps: int) -> dict:
    env = dict(os.environ, FOCKFUSION_NUMBA=numba_flag)
    proc = subprocess.run(
        [sys.executable, "-c", CHILD, json.dumps([d, steps])],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--d", type=int, default=12)
    parser.add_argument("--steps", type=int, default=3_000_000)
    parser.add_argument(
        "--pure-steps",
        type=int,
        default=None,
        help="smaller step count for the pure path (default steps/20)",
    )
    args = parser.parse_args()
    pure_steps = args.pure_steps or max(args.steps // 20, 100_000)

    jit = run_child("1", args.d, args.steps)
    pure = run_child("0", args.d, pure_steps)

    if jit["rate"] != pure["rate"] and args.steps == pure_steps:
        print("WARNING: paths disagree on identical configs", file=sys.stderr)

    print(f"walk kernel, d={args.d}, balanced recycled")
    for label, r in (("jit", jit), ("pure", pure)):
        sps = r["steps"] / r["seconds"]
        print(
            f"  {label:5s} {r['steps']:>10,} steps  {r['seconds']:8.2f}s"
            f"  {sps / 1e6:8.2f} M steps/s  rate={r['rate']:.4e}"
        )
    speedup = (jit["steps"] / jit["seconds"]) / (pure["steps"] / pure["seconds"])
    print(f"  speedup {speedup:.0f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
