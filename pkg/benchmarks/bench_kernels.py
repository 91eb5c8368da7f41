#!/usr/bin/env python3
"""Benchmark the numpy and numba kernel backends against each other.

Times the attention-weight kernels on a sweep-sized workload and the
row-skip browsing simulator on a large trajectory budget, then prints the
per-backend duration and the speedup. The same inputs feed both backends,
so the outputs are also cross-checked for agreement.

Usage: python benchmarks/bench_kernels.py [--trajectories N] [--rankings N]
"""

import argparse
import time

import numpy as np

from gridfair._kernels import BACKENDS, HAS_NUMBA


def make_workload(rng, n_rankings, length, columns):
    grids = []
    for _ in range(n_rankings):
        cont = rng.uniform(0.2, 0.9, size=length)
        n_rows = (length + columns - 1) // columns
        lens = np.full(n_rows, columns, dtype=np.int64)
        lens[-1] = length - columns * (n_rows - 1)
        grids.append((cont, lens))
    return grids


def bench_attention(kernels, grids, gamma):
    start = time.perf_counter()
    sink = 0.0
    for cont, lens in grids:
        sink += kernels["base_weights"](cont)[-1]
        sink += kernels["row_skip_weights"](cont, lens, gamma, True)[-1]
        sink += kernels["slow_decay_weights"](cont, lens, 1.9)[-1]
    return time.perf_counter() - start, sink


def bench_simulation(kernels, cont, lens, gamma, n_trajectories, seed, chunk=1 << 16):
    rng = np.random.default_rng(seed)
    visits = np.zeros(cont.shape[0], dtype=np.int64)
    start = time.perf_counter()
    left = n_trajectories
    while left > 0:
        t = min(chunk, left)
        skip_u = rng.random((t, lens.shape[0]))
        cont_u = rng.random((t, cont.shape[0]))
        kernels["mc_row_skip_counts"](cont, lens, gamma, skip_u, cont_u, visits)
        left -= t
    return time.perf_counter() - start, visits


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rankings", type=int, default=2000)
    parser.add_argument("--length", type=int, default=500)
    parser.add_argument("--columns", type=int, default=5)
    parser.add_argument("--trajectories", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if not HAS_NUMBA:
        print("numba is not importable; only the numpy backend can run")

    rng = np.random.default_rng(args.seed)
    grids = make_workload(rng, args.rankings, args.length, args.columns)
    sim_cont = rng.uniform(0.2, 0.9, size=9)
    sim_lens = np.array([3, 3, 3], dtype=np.int64)

    if HAS_NUMBA:
        # compile outside the timed region
        bench_attention(BACKENDS["numba"], grids[:1], 0.5)
        bench_simulation(BACKENDS["numba"], sim_cont, sim_lens, 0.5, 1000, args.seed)

    print(
        f"attention workload: {args.rankings} rankings x {args.length} items "
        f"({args.columns} columns); simulation: {args.trajectories:,} trajectories on 3x3"
    )
    print(f"{'task':<12} {'backend':<8} {'seconds':>9}")
    times = {}
    outputs = {}
    for name in [b for b in ("numpy", "numba") if b in BACKENDS]:
        duration, sink = bench_attention(BACKENDS[name], grids, 0.5)
        times[("attention", name)] = duration
        outputs[("attention", name)] = sink
        print(f"{'attention':<12} {name:<8} {duration:>9.3f}")
        duration, visits = bench_simulation(
            BACKENDS[name], sim_cont, sim_lens, 0.5, args.trajectories, args.seed
        )
        times[("simulate", name)] = duration
        outputs[("simulate", name)] = visits
        print(f"{'simulate':<12} {name:<8} {duration:>9.3f}")

    if HAS_NUMBA:
        for task in ("attention", "simulate"):
            ratio = times[(task, "numpy")] / times[(task, "numba")]
            print(f"{task}: numba is {ratio:.1f}x the numpy backend")
        assert outputs[("attention", "numpy")] == outputs[("attention", "numba")]
        assert np.array_equal(outputs[("simulate", "numpy")], outputs[("simulate", "numba")])
        print("backends agree on identical inputs")


if __name__ == "__main__":
    main()
