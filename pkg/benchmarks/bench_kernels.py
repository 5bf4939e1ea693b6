"""Compiled vs pure-Python kernels: timings and agreement.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""
import argparse
import json
import sys
import timeit

import numpy as np

from elliptic_condnum import _kernels_py
from elliptic_condnum.sampler import real_block_positions, real_schur, sample_matrix

try:
    from elliptic_condnum import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _cases():
    schur = {}
    for n in (10, 50, 200):
        t = real_schur(sample_matrix(n, 0.5, seed=1, index=0).entries)
        schur[n] = (np.ascontiguousarray(t), real_block_positions(t), 64 * np.finfo(float).eps * np.linalg.norm(t))
    return [
        ("phi_scaled m=200", lambda k: k.phi_scaled(3.0, 0.5, 200)),
        ("prt_reduced m=100", lambda k: k.prt_reduced(2.0, 0.7, 100)),
        ("prt_reduced m=1000", lambda k: k.prt_reduced(10.0, 0.7, 1000)),
    ] + [
        # residuals are rounding-level diagnostics; compare overlaps and flags
        (f"schur_overlaps n={n}", lambda k, c=schur[n]: k.schur_overlaps(*c)[::2]) for n in schur
    ]


def _max_rel_diff(a, b):
    worst = 0.0
    for x, y in zip(a, b):
        x, y = np.asarray(x, float), np.asarray(y, float)
        fin = np.isfinite(x) & np.isfinite(y)
        if fin.any():
            worst = max(worst, float(np.max(np.abs(x[fin] - y[fin]) / np.maximum(np.abs(y[fin]), 1e-300))))
    return worst


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not available; build with `pip install -e . --no-build-isolation`")
        return 1
    rows = []
    print(f"{'case':24s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, call in _cases():
        t_py = min(timeit.repeat(lambda: call(_kernels_py), number=1, repeat=args.repeat))
        t_c = min(timeit.repeat(lambda: call(_ckernels), number=1, repeat=args.repeat))
        diff = _max_rel_diff(call(_kernels_py), call(_ckernels))
        rows.append({"case": name, "python_s": t_py, "cython_s": t_c, "speedup": t_py / t_c, "max_rel_diff": diff})
        print(f"{name:24s} {1e3 * t_py:12.3f} {1e3 * t_c:12.3f} {t_py / t_c:8.1f} {diff:13.2e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
