"""Ground-truth influence: Monte-Carlo IC diffusion and exact enumeration.

Nothing here touches the sketch machinery. Random edge outcomes come from a
Philox counter-based generator keyed by the caller's seed; trial ``t`` uses
uniforms ``t*m .. t*m + m - 1`` of the stream, one per canonical edge, so any
block partition of the trials reproduces the same outcomes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .graph import CapacityError, Graph, ProbabilityModel

EXACT_MAX_EDGES = 20
_BLOCK_EDGES = 1 << 21


@dataclass
class SimEstimate:
    mean: float
    stderr: float
    rounds: int
    rng_seed: int
    samples: np.ndarray | None = None


def _reach_block(n: int, u: np.ndarray, v: np.ndarray, fired: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    """Activated-vertex counts for a block of trials.

    An undirected cascade activates exactly the union of the fired-edge
    components containing a seed, so each block is solved as one
    block-diagonal graph of ``trials * n`` vertices.
    """
    trials = fired.shape[0]
    if len(seeds) == 0:
        return np.zeros(trials, dtype=np.int64)
    t, e = np.nonzero(fired)
    src = t * n + u[e]
    dst = t * n + v[e]
    size = trials * n
    adj = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(size, size))
    _, labels = connected_components(adj, directed=False)
    comp_size = np.bincount(labels)
    seed_labels = labels[np.arange(trials)[:, None] * n + seeds[None, :]]
    seed_labels.sort(axis=1)
    first = np.ones_like(seed_labels, dtype=bool)
    first[:, 1:] = seed_labels[:, 1:] != seed_labels[:, :-1]
    return (comp_size[seed_labels] * first).sum(axis=1)


def simulate_ic(
    g: Graph,
    model: ProbabilityModel,
    seeds,
    rounds: int = 10000,
    rng_seed: int = 0,
    keep_samples: bool = False,
) -> SimEstimate:
    """Estimate the expected number of vertices activated by ``seeds``."""
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    seeds = np.unique(np.asarray(list(seeds), dtype=np.int64))
    if len(seeds) and (seeds.min() < 0 or seeds.max() >= g.n):
        raise ValueError("seed out of range")
    u, v = g.edges()
    p = model.probabilities(g, u, v) if len(u) else np.zeros(0)
    m = len(u)
    rng = np.random.Generator(np.random.Philox(key=rng_seed))
    block = max(1, min(rounds, _BLOCK_EDGES // max(m, 1), _BLOCK_EDGES // max(g.n, 1)))
    counts = np.empty(rounds, dtype=np.int64)
    done = 0
    while done < rounds:
        b = min(block, rounds - done)
        fired = rng.random((b, m)) < p[None, :]
        counts[done : done + b] = _reach_block(g.n, u, v, fired, seeds)
        done += b
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / math.sqrt(rounds)) if rounds > 1 else 0.0
    return SimEstimate(mean, stderr, rounds, rng_seed, counts if keep_samples else None)


def exact_sigma_small(g: Graph, model: ProbabilityModel, seeds) -> float:
    """Expected spread by summing over all ``2**m`` live-edge subsets."""
    if g.m > EXACT_MAX_EDGES:
        raise CapacityError(f"exact enumeration limited to {EXACT_MAX_EDGES} edges, graph has {g.m}")
    seeds = sorted(set(int(s) for s in seeds))
    us, vs = g.edges()
    edges = list(zip(us.tolist(), vs.tolist()))
    probs = [model.probability(g, a, b) for a, b in edges]
    incident: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for bit, (a, b) in enumerate(edges):
        incident[a].append((bit, b))
        incident[b].append((bit, a))
    total = 0.0
    for mask in range(1 << len(edges)):
        weight = 1.0
        for bit, q in enumerate(probs):
            weight *= q if mask >> bit & 1 else 1.0 - q
        if weight == 0.0:
            continue
        seen = set(seeds)
        stack = list(seeds)
        while stack:
            x = stack.pop()
            for bit, y in incident[x]:
                if mask >> bit & 1 and y not in seen:
                    seen.add(y)
                    stack.append(y)
        total += weight * len(seen)
    return total
