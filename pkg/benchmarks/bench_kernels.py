#!/usr/bin/env python3
"""Numba vs numpy for the heat-probe kernels.

Times the batched chart metric and the finite-difference scalar curvature
on the same random chart points and checks that both backends agree.

    python benchmarks/bench_kernels.py [--sizes 500 2000 8000] [--repeat 3]
"""
import argparse
import time

import numpy as np

from isospec import heatprobe, jmaps, kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[500, 2000, 8000])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    j = jmaps.isospectral_family(np.pi / 2)
    jz1, jz2 = j.jz1, j.jz2
    h = heatprobe.FD_STEP

    # first call compiles (or loads the on-disk cache); keep it out of the timings
    t0 = time.perf_counter()
    x0 = np.zeros((1, 8))
    kernels.chart_metric_batch(jz1, jz2, x0, 0, backend="numba")
    kernels.scalar_curvature_batch(jz1, jz2, x0, 0, h, backend="numba")
    print(f"numba warmup: {time.perf_counter() - t0:.1f} s\n")

    print(f"{'kernel':<10} {'N':>6}  {'numpy (s)':>10}  {'numba (s)':>10}  {'speedup':>8}  {'max rel diff':>12}")
    print("-" * 66)
    for N in args.sizes:
        X, charts = heatprobe.sample_chart_points(4, N, args.seed)

        t_np, g_np = best_of(lambda: kernels.chart_metric_batch(jz1, jz2, X, charts, backend="numpy"), args.repeat)
        t_nb, g_nb = best_of(lambda: kernels.chart_metric_batch(jz1, jz2, X, charts, backend="numba"), args.repeat)
        diff = float(np.max(np.abs(g_np - g_nb)) / np.max(np.abs(g_np)))
        print(f"{'metric':<10} {N:>6}  {t_np:>10.3f}  {t_nb:>10.3f}  {t_np / t_nb:>7.1f}x  {diff:>12.1e}")

        t_np, (s_np, _) = best_of(lambda: kernels.scalar_curvature_batch(jz1, jz2, X, charts, h, backend="numpy"), args.repeat)
        t_nb, (s_nb, _) = best_of(lambda: kernels.scalar_curvature_batch(jz1, jz2, X, charts, h, backend="numba"), args.repeat)
        diff = float(np.nanmax(np.abs(s_np - s_nb) / np.abs(s_np)))
        print(f"{'scal':<10} {N:>6}  {t_np:>10.3f}  {t_nb:>10.3f}  {t_np / t_nb:>7.1f}x  {diff:>12.1e}")


if __name__ == "__main__":
    main()
