#!/usr/bin/env python3
"""Compare the compiled kernel extension against the numpy fallback.

Times the two hot kernels (Gini split scan, gradient/hessian histogram
build) on synthetic workloads, then a full model fit under each backend.

Usage: python3 benchmarks/bench_kernels.py [--rows N] [--repeats R]
"""

import argparse
import time

import numpy as np

from sdnguard._kernels import _fallback


def _load_compiled():
    try:
        from sdnguard._kernels import _core

        return _core
    except ImportError:
        return None


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_gini(backend, rows, repeats):
    rng = np.random.default_rng(0)
    x = np.sort(rng.standard_normal(rows))
    y = rng.integers(0, 5, rows).astype(np.int64)

    return _time(lambda: backend.gini_split_scan(x, y, 5, 1), repeats)


def bench_hist(backend, rows, repeats):
    rng = np.random.default_rng(1)
    codes = rng.integers(0, 256, rows).astype(np.int32)
    idx = np.arange(rows, dtype=np.int32)
    grad = rng.standard_normal(rows)
    hess = rng.random(rows)

    return _time(lambda: backend.hist_build(codes, idx, grad, hess, 256), repeats)


def bench_tree_fit(rows, repeats, force_fallback):
    import importlib
    import os
    import subprocess
    import sys

    # backend choice happens at import, so the fit benchmark runs in a
    # subprocess with/without SDNGUARD_FORCE_FALLBACK
    code = (
        "import time, numpy as np\n"
        "from sdnguard.learners.tree import DecisionTreeClassifier\n"
        "rng = np.random.default_rng(0)\n"
        f"X = rng.standard_normal(({rows}, 10))\n"
        f"y = rng.integers(0, 5, {rows})\n"
        f"best = min(\n"
        f"    (lambda t0: (DecisionTreeClassifier(max_depth=8).fit(X, y),"
        f" time.perf_counter() - t0)[1])(time.perf_counter())\n"
        f"    for _ in range({repeats})\n"
        ")\n"
        "print(best)\n"
    )
    env = dict(os.environ)
    if force_fallback:
        env["SDNGUARD_FORCE_FALLBACK"] = "1"
    else:
        env.pop("SDNGUARD_FORCE_FALLBACK", None)
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True
    )
    return float(out.stdout.strip())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    core = _load_compiled()
    print(f"{'kernel':<22}{'fallback (s)':>14}{'compiled (s)':>14}{'speedup':>10}")
    for name, bench in (("gini_split_scan", bench_gini), ("hist_build", bench_hist)):
        t_fb = bench(_fallback, args.rows, args.repeats)
        if core is None:
            print(f"{name:<22}{t_fb:>14.6f}{'n/a':>14}{'n/a':>10}")
            continue
        t_c = bench(core, args.rows, args.repeats)
        print(f"{name:<22}{t_fb:>14.6f}{t_c:>14.6f}{t_fb / t_c:>9.2f}x")

    fit_rows = min(args.rows, 20_000)
    t_fb = bench_tree_fit(fit_rows, max(1, args.repeats // 2), force_fallback=True)
    t_any = bench_tree_fit(fit_rows, max(1, args.repeats // 2), force_fallback=False)
    label = "tree fit (end to end)"
    if core is None:
        print(f"{label:<22}{t_fb:>14.6f}{'n/a':>14}{'n/a':>10}")
    else:
        print(f"{label:<22}{t_fb:>14.6f}{t_any:>14.6f}{t_fb / t_any:>9.2f}x")


if __name__ == "__main__":
    main()
