"""Compiled kernel vs pure-Python fallback on the same workloads.

    python benchmarks/bench_backends.py [--n 5000] [--R 64] [--k 20] [--repeat 3]

Prints one CSV row per (workload, backend) with the best-of-N wall time and
the speedup of the compiled kernel. Results are checked to be identical.
The fallback caches per-graph preprocessing, so best-of-N leaves it out.
"""
from __future__ import annotations

import argparse
import csv
import sys
import time

import numpy as np

from icsketch import _backend
from icsketch.graph import Constant, DegreeWeighted, preferential_attachment
from icsketch.select import select
from icsketch.sketch import SketchSet, select_centers


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def workloads(g, R, k):
    cs1 = select_centers(g, 1.0, 0)
    cs01 = select_centers(g, 0.1, 0)
    probe = np.arange(0, g.n, max(1, g.n // 2000))

    def build(model, cs):
        return lambda b: SketchSet(g, model, R, cs, backend=b).sizes.copy()

    def marginals(model, cs):
        def run(b):
            ss = SketchSet(g, model, R, cs, backend=b)
            return ss.marginal_many(probe)

        return run

    def selection(model, cs, method):
        return lambda b: select(SketchSet(g, model, R, cs, backend=b), k, method).seeds

    return [
        ("build p=0.02 alpha=1", build(Constant(0.02), cs1)),
        ("build wic alpha=0.1", build(DegreeWeighted(), cs01)),
        ("marginals p=0.02 alpha=0.1", marginals(Constant(0.02), cs01)),
        ("marginals wic alpha=0.1", marginals(DegreeWeighted(), cs01)),
        ("celf p=0.02 alpha=0.1", selection(Constant(0.02), cs01, "celf")),
        ("wintree p=0.02 alpha=1", selection(Constant(0.02), cs1, "wintree")),
    ]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--R", type=int, default=64)
    ap.add_argument("--k", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = _backend.available()
    if "compiled" not in backends:
        print("compiled kernel not built; only the Python fallback is available", file=sys.stderr)
    g = preferential_attachment(args.n, 3, seed=1)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["workload", "backend", "seconds", "speedup"])
    for name, fn in workloads(g, args.R, args.k):
        times, outs = {}, {}
        for b in backends:
            times[b], outs[b] = best_of(lambda: fn(b), args.repeat)
        ref = outs[backends[0]]
        for b in backends:
            if not np.array_equal(np.asarray(outs[b]), np.asarray(ref)):
                raise SystemExit(f"{name}: backends disagree")
        for b in backends:
            speed = times["python"] / times[b] if "python" in times else 1.0
            w.writerow([name, b, f"{times[b]:.4f}", f"{speed:.1f}"])
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
