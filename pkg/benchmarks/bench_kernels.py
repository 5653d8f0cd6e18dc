#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot primitives on workloads shaped like the real call
sites (mollifier stencil quadrature, lattice cover counting), then an
end-to-end pipeline run under each backend.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from tflat import _kernels_py

try:
    from tflat import _kernels as _compiled
except ImportError:
    _compiled = None


def timeit(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def workload_mollifier(quick):
    """Points x stencil x pieces shaped like smooth_window at h=1/256."""
    rng = np.random.default_rng(0)
    n_pts = 20_000 if quick else 120_000
    pts = rng.uniform(-0.2, 1.4, size=(n_pts, 2))
    r = 8 if quick else 15
    ax = np.arange(-r, r + 1) / 256.0
    sx, sy = np.meshgrid(ax, ax, indexing="ij")
    stencil = np.stack([sx.ravel(), sy.ravel()], axis=1)
    keep = np.linalg.norm(stencil, axis=1) < r / 256.0
    stencil = stencil[keep]
    weights = np.exp(-np.linalg.norm(stencil, axis=1) ** 2)
    weights /= weights.sum()
    inv = np.array([np.linalg.inv([[1.2, 0.0], [0.5, 0.3]])])
    off = np.array([[0.0, 0.0]])
    return pts, stencil, weights, inv, off


def workload_cover(quick):
    """Grid points x lattice translates, one sheared piece."""
    rng = np.random.default_rng(1)
    n_pts = 30_000 if quick else 200_000
    pts = rng.uniform(0, 1, size=(n_pts, 2))
    ks = np.array(np.meshgrid(np.arange(-6, 7), np.arange(-6, 7),
                              indexing="ij")).reshape(2, -1).T
    shifts = ks.astype(float)
    weights = np.ones(len(shifts))
    inv = np.array([np.linalg.inv([[1 / 3, 2.0], [0.0, 3.0]])])
    off = np.array([[0.0, 0.0]])
    return pts, shifts, weights, inv, off


def bench_kernels(quick):
    rows = []
    for name, work in (("mollifier-stencil", workload_mollifier(quick)),
                       ("cover-counting", workload_cover(quick))):
        t_py = timeit(_kernels_py.shift_multiplicity_sum_2d, *work)
        if _compiled is not None:
            t_cy = timeit(_compiled.shift_multiplicity_sum_2d, *work)
            rows.append((name, t_py, t_cy, t_py / t_cy))
        else:
            rows.append((name, t_py, None, None))
    return rows


def bench_end_to_end():
    """Full diag pipeline + certification under each backend."""
    code = ("import time; t0=time.perf_counter(); "
            "from tflat import diag_pipeline, execute_pipeline, tight_residual; "
            "r = execute_pipeline(diag_pipeline(1.2, 0.3, 1.0, 1.0, grid_h=1/256)); "
            "resid = tight_residual(r.window, r.lattice, n_samples=8); "
            "print(time.perf_counter()-t0)")
    out = []
    for force in ("0", "1"):
        env = dict(os.environ, TFLAT_FORCE_PYTHON_KERNELS=force)
        if force == "0":
            env.pop("TFLAT_FORCE_PYTHON_KERNELS")
        p = subprocess.run([sys.executable, "-c", code], env=env,
                           capture_output=True, text=True)
        out.append(float(p.stdout.strip().splitlines()[-1]))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args()

    if _compiled is None:
        print("compiled kernels unavailable; timing the fallback only")
    print(f"{'workload':<20} {'python':>10} {'cython':>10} {'speedup':>9}")
    for name, t_py, t_cy, speedup in bench_kernels(args.quick):
        cy = f"{t_cy * 1e3:9.1f}ms" if t_cy is not None else "      n/a"
        sp = f"{speedup:8.1f}x" if speedup is not None else "      n/a"
        print(f"{name:<20} {t_py * 1e3:9.1f}ms {cy} {sp}")

    if not args.skip_e2e and _compiled is not None:
        t_cy, t_py = bench_end_to_end()
        print(f"{'pipeline end-to-end':<20} {t_py * 1e3:9.1f}ms "
              f"{t_cy * 1e3:9.1f}ms {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
