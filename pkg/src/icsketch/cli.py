"""Command-line front end.

    icsketch run    --graph G.txt [--p 0.02 | --uniform LO HI | --wic] ...
    icsketch verify --graph G.txt ...
    icsketch bench  --graph G.txt --alphas 1,0.5,0.1 --methods celf,wintree

Exit status: 0 success, 1 verification failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass

from .graph import Constant, DegreeWeighted, GraphFormatError, CapacityError, UniformRange, read_graph
from .select import SELECTORS, select
from .simulate import simulate_ic
from .sketch import SketchSet, center_count, select_centers, sketch_memory_bytes
from .verify import HOLDOUT_FIRST_ID, run_all

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

REPORT_VERSION = 1


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    graph: str
    format: str = "edgelist"
    model: object = None
    R: int = 256
    alpha: float = 1.0
    k: int = 100
    method: str = "wintree"
    threads: int = 1
    rng_seed: int = 0
    output: str = "json"
    mc_rounds: int = 0

    def validate(self, n: int) -> None:
        if self.R < 1:
            raise UsageError("--R must be at least 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise UsageError("--alpha must lie in [0, 1]")
        if not 1 <= self.k <= n:
            raise UsageError(f"--k must lie in [1, n={n}]")
        if self.method not in SELECTORS:
            raise UsageError(f"--method must be one of {sorted(SELECTORS)}")
        if self.threads < 1:
            raise UsageError("--threads must be positive")

    def model_info(self) -> dict:
        m = self.model
        if isinstance(m, Constant):
            return {"type": "constant", "p": m.p}
        if isinstance(m, UniformRange):
            return {"type": "uniform", "lo": m.lo, "hi": m.hi}
        return {"type": "wic"}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True, help="graph file")
    p.add_argument("--format", choices=["edgelist", "csr"], default="edgelist")
    prob = p.add_mutually_exclusive_group()
    prob.add_argument("--p", type=float, default=None, help="constant edge probability (default 0.02)")
    prob.add_argument("--uniform", type=float, nargs=2, metavar=("LO", "HI"), help="per-edge probability in [LO, HI]")
    prob.add_argument("--wic", action="store_true", help="p_uv = 2 / (deg u + deg v)")
    p.add_argument("--R", type=int, default=256, help="number of sketches")
    p.add_argument("--alpha", type=float, default=1.0, help="fraction of vertices used as centers")
    p.add_argument("--k", type=int, default=100, help="number of seeds")
    p.add_argument("--method", default="wintree", help=f"one of {sorted(SELECTORS)}")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--output", choices=["json", "csv", "human"], default="json")
    p.add_argument("--mc-rounds", type=int, default=0, help="Monte-Carlo rounds for spread validation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="icsketch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"icsketch report v{REPORT_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("run", help="select seeds"))
    v = sub.add_parser("verify", help="run oracle self-checks")
    _common(v)
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    b = sub.add_parser("bench", help="sweep alpha x method")
    _common(b)
    b.add_argument("--alphas", default="1,0.5,0.2,0.1", help="comma-separated alpha values")
    b.add_argument("--methods", default="celf,ptree,wintree", help="comma-separated methods")
    return parser


def _config(args) -> RunConfig:
    if args.uniform is not None:
        lo, hi = args.uniform
        if not 0.0 <= lo <= hi <= 1.0:
            raise UsageError("--uniform needs 0 <= LO <= HI <= 1")
        model = UniformRange(lo, hi)
    elif args.wic:
        model = DegreeWeighted()
    else:
        p = 0.02 if args.p is None else args.p
        if not 0.0 <= p <= 1.0:
            raise UsageError("--p must lie in [0, 1]")
        model = Constant(p)
    return RunConfig(
        graph=args.graph,
        format=args.format,
        model=model,
        R=args.R,
        alpha=args.alpha,
        k=args.k,
        method=args.method,
        threads=args.threads,
        rng_seed=args.rng_seed,
        output=args.output,
        mc_rounds=args.mc_rounds,
    )


def _load(cfg: RunConfig):
    if not os.path.exists(cfg.graph):
        raise UsageError(f"no such graph file: {cfg.graph}")
    try:
        g = read_graph(cfg.graph, cfg.format)
    except (GraphFormatError, CapacityError) as exc:
        raise UsageError(f"{cfg.graph}: {exc}") from None
    cfg.validate(g.n)
    return g


def run_pipeline(cfg: RunConfig, g=None, log=None) -> dict:
    log = log or sys.stderr
    if g is None:
        g = _load(cfg)
    else:
        cfg.validate(g.n)
    rho = center_count(g.n, cfg.alpha)
    est = sketch_memory_bytes(g.n, cfg.R, rho)
    print(f"sketch memory estimate: {est} bytes (R={cfg.R}, rho={rho}, n={g.n})", file=log)
    t0 = time.perf_counter()
    ss = SketchSet(g, cfg.model, cfg.R, select_centers(g, cfg.alpha, cfg.rng_seed), cfg.threads)
    sketch_s = time.perf_counter() - t0
    res = select(ss, cfg.k, cfg.method)
    report = {
        "version": REPORT_VERSION,
        "graph": {"path": cfg.graph, "n": g.n, "m": g.m},
        "config": {
            "model": cfg.model_info(),
            "R": cfg.R,
            "alpha": cfg.alpha,
            "rho": rho,
            "k": cfg.k,
            "method": cfg.method,
            "threads": cfg.threads,
            "rng_seed": cfg.rng_seed,
            "backend": ss.backend,
        },
        "seeds": res.seeds,
        "gain_sums": res.gains,
        "gains": res.mean_gains,
        "spread_estimate": res.spread,
        "evaluations": res.stats.as_dict(),
        "sketch_bytes": ss.memory_bytes(),
        "timings": {"sketch_s": sketch_s, "select_s": res.select_seconds},
    }
    if cfg.mc_rounds > 0:
        mc = simulate_ic(g, cfg.model, res.seeds, cfg.mc_rounds, cfg.rng_seed)
        held, held_se = ss.estimate_sigma(res.seeds, first_id=HOLDOUT_FIRST_ID)
        report["mc"] = {
            "rounds": mc.rounds,
            "mean": mc.mean,
            "stderr": mc.stderr,
            "holdout_sketch_estimate": held,
            "holdout_sketch_stderr": held_se,
        }
    return report


def format_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rank", "seed", "gain", "gain_sum", "evaluations"])
        per_round = report["evaluations"]["per_round"]
        for i, (s, g, gs) in enumerate(zip(report["seeds"], report["gains"], report["gain_sums"])):
            w.writerow([i + 1, s, repr(g), gs, per_round[i]])
        return buf.getvalue().rstrip("\n")
    c, e = report["config"], report["evaluations"]
    lines = [
        f"graph      {report['graph']['path']}  n={report['graph']['n']} m={report['graph']['m']}",
        f"config     method={c['method']} R={c['R']} alpha={c['alpha']} rho={c['rho']} k={c['k']} "
        f"threads={c['threads']} backend={c['backend']}",
        f"seeds      {' '.join(map(str, report['seeds']))}",
        f"spread     {report['spread_estimate']:.3f} (sketch estimate)",
        f"evals      initial={e['initial']} selection={e['selection_total']} total={e['total']}",
        f"bfs visits {e['bfs_visits']['total']} (selection {e['bfs_visits']['selection']})",
        f"memory     {report['sketch_bytes']} bytes",
        f"time       sketch {report['timings']['sketch_s']:.3f}s  select {report['timings']['select_s']:.3f}s",
    ]
    if "mc" in report:
        mc = report["mc"]
        lines.append(f"MC spread  {mc['mean']:.3f} +- {mc['stderr']:.3f} over {mc['rounds']} rounds")
    return "\n".join(lines)


def cmd_run(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    report = run_pipeline(cfg)
    print(format_report(report, cfg.output), file=out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, inject_fault: bool = False, out=None) -> int:
    out = out or sys.stdout
    g = _load(cfg)
    checks = run_all(
        g,
        cfg.model,
        cfg.R,
        cfg.alpha,
        cfg.rng_seed,
        cfg.k,
        cfg.threads,
        mc_rounds=cfg.mc_rounds or 2000,
        inject_fault=inject_fault,
    )
    ok = all(c.passed for c in checks)
    if cfg.output == "json":
        print(json.dumps({"passed": ok, "checks": [c.__dict__ for c in checks]}, indent=2), file=out)
    else:
        for c in checks:
            print(c.line(), file=out)
        print("verify: " + ("PASS" if ok else "FAIL"), file=out)
    return EXIT_OK if ok else EXIT_FAIL


BENCH_FIELDS = ["alpha", "method", "sketch_s", "select_s", "evals", "bytes", "bfs_visits"]


def cmd_bench(cfg: RunConfig, alphas, methods, out=None) -> int:
    out = out or sys.stdout
    g = _load(cfg)
    for m in methods:
        if m not in SELECTORS:
            raise UsageError(f"unknown method {m!r}")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(BENCH_FIELDS)
    for a in alphas:
        if not 0.0 <= a <= 1.0:
            raise UsageError("alpha values must lie in [0, 1]")
        centers = select_centers(g, a, cfg.rng_seed)
        for m in methods:
            t0 = time.perf_counter()
            ss = SketchSet(g, cfg.model, cfg.R, centers, cfg.threads)
            sketch_s = time.perf_counter() - t0
            res = select(ss, cfg.k, m)
            w.writerow([a, m, f"{sketch_s:.6f}", f"{res.select_seconds:.6f}", res.stats.total_evaluations,
                        ss.memory_bytes(), res.stats.bfs_visits])
            out.flush()
    return EXIT_OK


def _floats(s: str) -> list[float]:
    try:
        return [float(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad number list {s!r}") from None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, inject_fault=args.inject_fault)
        methods = [m.strip() for m in args.methods.split(",") if m.strip()]
        return cmd_bench(cfg, _floats(args.alphas), methods)
    except UsageError as exc:
        print(f"icsketch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
