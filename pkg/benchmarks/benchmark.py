"""Compare the compiled episode kernel against the plain-Python fallback.

Runs the same batch of full episodes through numba-compiled kernels and
through the uncompiled reference path, then prints the per-episode timings.
Run from the repository root:

    python3 benchmarks/benchmark.py --episodes 20
"""
import argparse
import time

from abrlab import kernels
from abrlab._accel import NUMBA_ENABLED
from abrlab.cli import run_single
from abrlab.config import RunConfig


def time_batch(episodes: int, scenario: int, duration: float) -> float:
    start = time.perf_counter()
    for seed in range(episodes):
        cfg = RunConfig()
        cfg.scenario = scenario
        cfg.replan = True
        cfg.duration = duration
        run_single(cfg, seed)
    return (time.perf_counter() - start) / episodes


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--episodes", type=int, default=20)
    ap.add_argument("--scenario", type=int, default=2, choices=(1, 2, 3))
    ap.add_argument("--duration", type=float, default=600.0)
    args = ap.parse_args()

    if not NUMBA_ENABLED:
        print("numba is disabled in this process; only the fallback is measured.")
        plain = time_batch(args.episodes, args.scenario, args.duration)
        print(f"fallback: {plain * 1e3:9.2f} ms/episode")
        return 0

    # warm-up call so compilation time is reported separately
    warm = RunConfig()
    warm.duration = 20.0
    t0 = time.perf_counter()
    run_single(warm, 0)
    compile_s = time.perf_counter() - t0

    jitted = time_batch(args.episodes, args.scenario, args.duration)

    compiled = kernels.episode_loop
    kernels.episode_loop = kernels._episode_loop
    try:
        plain = time_batch(args.episodes, args.scenario, args.duration)
    finally:
        kernels.episode_loop = compiled

    print(f"{args.episodes} episodes, scenario {args.scenario}, "
          f"{args.duration:.0f} s simulated each")
    print(f"compile/load: {compile_s * 1e3:9.2f} ms (one-off, cached on disk)")
    print(f"compiled:     {jitted * 1e3:9.2f} ms/episode")
    print(f"fallback:     {plain * 1e3:9.2f} ms/episode")
    print(f"speedup:      {plain / jitted:9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
