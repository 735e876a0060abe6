"""Compare the compiled and pure-Python stable-law kernels.

Times ``pdf_std``, ``cdf_sf_std`` and ``pl_conj_std`` on the same inputs
through both backends and reports the speedup and the largest disagreement.

    python benchmarks/bench_kernels.py [--points 2000] [--repeat 3] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from stablebelief import _pykernels
from stablebelief.stable import StableParams, standard_mode

try:
    from stablebelief import _ckernels
except ImportError:
    _ckernels = None

CASES = [(1.5, 0.0), (1.5, 0.8), (1.1, -0.5), (0.8, 0.3), (1.9, 0.9)]


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(points: int, repeat: int):
    x = np.linspace(-10.0, 10.0, points)
    rows = []
    for alpha, beta in CASES:
        mode = standard_mode(StableParams(alpha, beta))
        calls = {
            "pdf_std": lambda k: k.pdf_std(x, alpha, beta),
            "cdf_sf_std": lambda k: k.cdf_sf_std(x, alpha, beta)[0],
            "pl_conj_std": lambda k: k.pl_conj_std(x, alpha, beta, mode),
        }
        for name, call in calls.items():
            t_py, v_py = best_of(lambda: call(_pykernels), repeat)
            row = {"kernel": name, "alpha": alpha, "beta": beta, "points": points, "python_s": t_py}
            if _ckernels is not None:
                t_c, v_c = best_of(lambda: call(_ckernels), repeat)
                row.update(cython_s=t_c, speedup=t_py / t_c,
                           max_abs_diff=float(np.max(np.abs(np.asarray(v_c) - np.asarray(v_py)))))
            rows.append(row)
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="also write the rows to this file")
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; timing the Python backend only", file=sys.stderr)
    rows = run(args.points, args.repeat)
    print(f"{'kernel':12s} {'alpha':>5s} {'beta':>5s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s} {'max diff':>9s}")
    for r in rows:
        print(f"{r['kernel']:12s} {r['alpha']:5.2f} {r['beta']:5.2f} {r['python_s']:10.4f} "
              f"{r.get('cython_s', float('nan')):10.4f} {r.get('speedup', float('nan')):8.1f} "
              f"{r.get('max_abs_diff', float('nan')):9.1e}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
