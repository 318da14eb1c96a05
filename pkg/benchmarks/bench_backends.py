#!/usr/bin/env python3
"""Benchmark the numba hot kernels against the pure-numpy fallback.

Times the two pairwise primitives on Gram-sized and flow-sized workloads,
then (optionally) a full particle-flow run under each backend in a
subprocess so the GSPM_BACKEND selection is exercised end to end.

Usage:
    python benchmarks/bench_backends.py [--n 256] [--L 64] [--repeats 5]
    python benchmarks/bench_backends.py --flow
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_primitives(n, L, repeats):
    from gspm._accel import numpy_impl

    try:
        from gspm._accel import numba_impl
    except ImportError:
        print("numba not importable; nothing to compare")
        return

    rng = np.random.default_rng(0)
    FA = np.ascontiguousarray(rng.standard_normal((n, L)))
    FB = np.ascontiguousarray(rng.standard_normal((n, L)))
    w = np.full(n, 1.0 / n)

    workloads = [
        ("pair_kernel_mean gauss-id", lambda impl: impl.pair_kernel_mean(FA, FB, 0, 0.3, 0.0)),
        ("pair_kernel_mean ss0-cum", lambda impl: impl.pair_kernel_mean(FA, FB, 2, 0.25, 9.0)),
        ("pair_dk_weighted gauss-id", lambda impl: impl.pair_dk_weighted(FA, FB, w, 0, 0.3, 0.0)),
        ("pair_dk_weighted dirac-cum", lambda impl: impl.pair_dk_weighted(FA, FB, w, 1, 0.0, 9.0)),
    ]

    # trigger JIT compilation outside the timed region
    for _, fn in workloads:
        fn(numba_impl)

    print(f"pairwise primitives, n={n}, L={L} (best of {repeats})")
    print(f"{'workload':<28} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, fn in workloads:
        t_np = best_of(lambda: fn(numpy_impl), repeats)
        t_nb = best_of(lambda: fn(numba_impl), repeats)
        print(f"{name:<28} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms {t_np / t_nb:>7.1f}x")


def run_flow_once():
    from gspm import backend_name
    from gspm.datasets import generate
    from gspm.flow import FlowConfig, run_flow
    from gspm.kernels import KernelSpec, OperatorSpec, SmoothingProfile
    from gspm.slicing import SliceFamily

    target = generate("swiss_roll", 50, seed=1000)
    init = generate("gaussian_init", 50, seed=0)
    spec = KernelSpec(
        SmoothingProfile.gaussian(0.1), OperatorSpec.identity(),
        SliceFamily("linear", 2), slice_count=10, seed=0,
    )
    config = FlowConfig(kernel=spec, eta=1.0, iterations=2000, seed=0,
                        eval_every=2000, log_every=2000, resample_slices=True)
    t0 = time.perf_counter()
    run_flow(init, target, config)
    print(f"  backend={backend_name}: 2000-step Swiss Roll flow in "
          f"{time.perf_counter() - t0:.2f}s")


def bench_flow():
    print("end-to-end particle flow (subprocess per backend)")
    for backend in ("numpy", "numba"):
        env = dict(os.environ, GSPM_BACKEND=backend)
        subprocess.run(
            [sys.executable, __file__, "--flow-child"], env=env, check=True
        )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=256, help="points per cloud")
    parser.add_argument("--L", type=int, default=64, help="slices")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--flow", action="store_true", help="also time a full flow per backend")
    parser.add_argument("--flow-child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.flow_child:
        run_flow_once()
        return
    bench_primitives(args.n, args.L, args.repeats)
    if args.flow:
        bench_flow()


if __name__ == "__main__":
    main()
