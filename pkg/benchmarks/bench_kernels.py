"""Timing of the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Both backends get identical inputs; the script also reports the largest
difference between their outputs.
"""
import argparse
import json
import math
import time

import numpy as np

from wavelife import kernels
from wavelife.exponents import ProblemKind, ProblemSpec
from wavelife.solver import InitialData, SolverConfig, simulate


def _best(fn, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_hyp2f1(backend, repeat, n=20000):
    z = np.linspace(0.0, 0.99, n)
    k = kernels.get(backend)
    return _best(lambda: k.hyp2f1_series(1.25, 1.75, 1.5, z, 1e-15, 10**6)[0], repeat)


def bench_leapfrog(backend, repeat, dr=0.01, t_max=20.0):
    cfg = SolverConfig(ProblemSpec(ProblemKind.COMBINED, 3, 2.0, 3.0), InitialData(), 0.05, dr, t_max)
    return _best(lambda: simulate(cfg, backend=backend).u, repeat)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="write the timings to this file")
    args = ap.parse_args()
    have = kernels.available()
    rows = []
    for name, fn in (("hyp2f1_series (20000 z)", bench_hyp2f1), ("leapfrog N=3 dr=0.01 t=20", bench_leapfrog)):
        res = {b: fn(b, args.repeat) for b in have}
        row = {"kernel": name, **{f"{b}_s": res[b][0] for b in have}}
        if "cython" in res:
            row["speedup"] = res["python"][0] / res["cython"][0]
            row["max_abs_diff"] = float(np.max(np.abs(res["python"][1] - res["cython"][1])))
        rows.append(row)
    for r in rows:
        print("  ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in r.items()))
    if "cython" not in have:
        print("compiled extension not built; only the fallback was timed")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
