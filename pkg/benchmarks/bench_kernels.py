#!/usr/bin/env python3
"""Compare the numba and numpy kernel backends.

Times each tensor kernel on inputs of the sizes the suite uses, then one full
suite pass per backend.  Run with ``python benchmarks/bench_kernels.py``.
"""

import argparse
import time

import numpy as np

from tanlift import _kernels
from tanlift.verify import SuiteConfig, run_suite


def kernel_inputs(n, rng):
    """Random inputs with the symmetries the kernels assume."""
    m = 2 * n
    a = rng.normal(size=(n, n))
    ginv = a @ a.T + n * np.eye(n)
    dg = rng.normal(size=(n, n, n))
    dg = dg + dg.transpose(1, 0, 2)
    d2g = rng.normal(size=(n, n, n, n))
    d2g = d2g + d2g.transpose(1, 0, 2, 3)
    d2g = d2g + d2g.transpose(0, 1, 3, 2)
    gam = rng.normal(size=(n, n, n))
    gam = gam + gam.transpose(0, 2, 1)
    G = rng.normal(size=(m, m))
    G = G + G.T
    dG = rng.normal(size=(m, m, m))
    dG = dG + dG.transpose(1, 0, 2)
    c = rng.normal(size=(m, m, m))
    c = c - c.transpose(0, 2, 1)
    om = rng.normal(size=(m, m))
    om = om - om.T
    dom = rng.normal(size=(m, m, m))
    dom = dom - dom.transpose(1, 0, 2)
    return {
        "christoffel": (ginv, dg),
        "christoffel_derivative": (ginv, dg, d2g),
        "curvature": (gam, rng.normal(size=(n, n, n, n))),
        "koszul_rhs": (G, dG, c),
        "coord_brackets": (rng.normal(size=(m, m)), rng.normal(size=(m, m, m)),
                           rng.normal(size=(m, m)), rng.normal(size=(m, m, m))),
        "exterior2": (om, dom, c),
    }


def time_call(fn, args, repeat):
    fn(*args)  # compile / warm up
    t = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t) / repeat


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", default="2,3,4,6")
    ap.add_argument("--repeat", type=int, default=2000)
    ap.add_argument("--suite-points", type=int, default=20)
    args = ap.parse_args()
    rng = np.random.default_rng(0)

    if not _kernels.HAVE_NUMBA:
        print("numba not installed; only the numpy backend is available")
        return

    print(f"{'kernel':24s} {'n':>2s} {'numpy us':>10s} {'numba us':>10s} {'speedup':>8s}")
    for n in (int(d) for d in args.dims.split(",")):
        for name, inputs in kernel_inputs(n, rng).items():
            a = np.asarray(_kernels.NUMPY_KERNELS[name](*inputs))
            b = np.asarray(_kernels.NUMBA_KERNELS[name](*inputs))
            assert np.allclose(a, b, rtol=1e-12, atol=1e-12), name
            t_np = time_call(_kernels.NUMPY_KERNELS[name], inputs, args.repeat)
            t_nb = time_call(_kernels.NUMBA_KERNELS[name], inputs, args.repeat)
            print(f"{name:24s} {n:2d} {t_np * 1e6:10.2f} {t_nb * 1e6:10.2f} {t_np / t_nb:8.1f}x")

    print()
    cfg = dict(metric="constant_curvature", c=1.0, points=args.suite_points)
    for name in ("numpy", "numba"):
        with _kernels.backend(name):
            run_suite(SuiteConfig(**cfg, dims=[2]))  # warm-up
            t = time.perf_counter()
            report = run_suite(SuiteConfig(**cfg))
            print(f"full suite ({name}): {time.perf_counter() - t:.2f} s, "
                  f"{len(report.records)} records")
    # jet arithmetic, not the kernels, dominates the suite wall time


if __name__ == "__main__":
    main()
