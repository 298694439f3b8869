"""Self-checks run by ``icsketch verify``.

Each check returns a :class:`Check`; a run passes iff every check does.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, ProbabilityModel
from .select import SELECTORS, select
from .simulate import simulate_ic
from .sketch import SketchSet, select_centers


#: sketch ids used for held-out spread estimates, disjoint from 0..R-1
HOLDOUT_FIRST_ID = 1 << 40


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def check_agreement(g: Graph, model: ProbabilityModel, R: int, alpha: float, rng_seed: int, k: int, threads: int = 1):
    """Four-way seed agreement plus the 2x evaluation bound of the batched tree."""
    results = {}
    for method in SELECTORS:
        ss = SketchSet.build(g, model, R, alpha, rng_seed, threads)
        results[method] = select(ss, k, method)
    ref = results["exhaustive"]
    bad = [m for m, r in results.items() if r.seeds != ref.seeds or r.gains != ref.gains]
    agree = Check(
        "four-way-agreement",
        not bad,
        "all selectors return identical seeds and gains" if not bad else f"mismatch in {bad}",
    )
    celf = results["celf"].stats.selection_evaluations
    ptree = results["ptree"].stats.selection_evaluations
    bound = Check("ptree-evaluation-bound", ptree <= 2 * celf, f"ptree {ptree} <= 2 x celf {celf}")
    return [agree, bound], results


def check_transparency(
    g: Graph,
    model: ProbabilityModel,
    R: int,
    rng_seed: int,
    seeds,
    alphas=(0.0, 0.1, 1.0),
    max_vertices: int = 2000,
    threads: int = 1,
    inject_fault: bool = False,
) -> Check:
    """Marginals agree exactly across center densities along a seed history."""
    sets = [SketchSet.build(g, model, R, a, rng_seed, threads) for a in alphas]
    probe = np.arange(g.n)
    if g.n > max_vertices:
        probe = np.sort(np.random.default_rng(rng_seed).choice(g.n, max_vertices, replace=False))
    if inject_fault:
        victim = next((s for s in sets if s.centers.rho > 0), None)
        if victim is not None:
            victim.kernel.sizes[0, 0] += 1
            probe = np.union1d(probe, victim.centers.centers[:1])
    seeds = list(seeds)
    for step in range(len(seeds) + 1):
        live = np.array([v for v in probe.tolist() if not sets[0].is_seed(v)], dtype=np.int64)
        ref = sets[0].marginal_many(live)
        for a, ss in zip(alphas[1:], sets[1:]):
            got = ss.marginal_many(live)
            if not np.array_equal(ref, got):
                v = int(live[np.flatnonzero(ref != got)[0]])
                return Check(
                    "compression-transparency",
                    False,
                    f"after {step} seeds, vertex {v}: alpha={alphas[0]} gives {ref[live == v][0]}, "
                    f"alpha={a} gives {got[live == v][0]}",
                )
        if step < len(seeds):
            for ss in sets:
                ss.mark_seed(seeds[step])
    return Check(
        "compression-transparency",
        True,
        f"{len(probe)} vertices x {len(seeds) + 1} seed prefixes identical across alpha={list(alphas)}",
    )


def check_mc(g: Graph, model: ProbabilityModel, sketches: SketchSet, seeds, rounds: int, rng_seed: int) -> Check:
    """Sketch spread estimate agrees with Monte-Carlo within 4 combined standard errors."""
    est, se_sketch = sketches.estimate_sigma(seeds, first_id=HOLDOUT_FIRST_ID)
    mc = simulate_ic(g, model, seeds, rounds, rng_seed)
    tol = 4.0 * math.hypot(se_sketch, mc.stderr) + 1e-9
    diff = abs(est - mc.mean)
    return Check(
        "mc-cross-check",
        diff <= tol,
        f"sketch {est:.3f} vs MC {mc.mean:.3f} (|diff| {diff:.3f} <= {tol:.3f})",
    )


def run_all(
    g: Graph,
    model: ProbabilityModel,
    R: int,
    alpha: float,
    rng_seed: int,
    k: int,
    threads: int = 1,
    mc_rounds: int = 2000,
    inject_fault: bool = False,
) -> list[Check]:
    checks, results = check_agreement(g, model, R, alpha, rng_seed, k, threads)
    seeds = results["celf"].seeds
    checks.append(check_transparency(g, model, R, rng_seed, seeds, threads=threads, inject_fault=inject_fault))
    if mc_rounds > 0:
        ss = SketchSet(g, model, R, select_centers(g, alpha, rng_seed), threads)
        checks.append(check_mc(g, model, ss, seeds, mc_rounds, rng_seed))
    return checks
