"""Greedy seed selection over a :class:`~icsketch.sketch.SketchSet`.

Four selectors share one contract: they return the same ordered seeds and
the same per-round gains for the same sketches, because every comparison
uses the (score desc, id asc) total order.

``exhaustive``
    evaluates every remaining vertex each round; the reference.
``celf``
    sequential lazy greedy with a binary heap.
``ptree``
    lazy greedy over an :class:`~icsketch.pqueue.OrderedScoreTree`,
    re-evaluating candidates in batches of 1, 2, 4, ... in parallel.
``wintree``
    lazy greedy over a :class:`~icsketch.pqueue.WinTree` with a pruned
    fork-join search.
"""
from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field

import numpy as np

from .pqueue import BestCell, OrderedScoreTree, ScoreKey, WinTree
from .sketch import EvalStats, SketchSet


@dataclass
class StaleScores:
    """Lazily refreshed marginal gains, as integer sums over sketches.

    ``delta[v]`` never undercuts ``v``'s true gain; ``-1`` marks a selected
    seed.
    """

    delta: list[int]

    def snapshot(self) -> np.ndarray:
        return np.array(self.delta, dtype=np.int64)


@dataclass
class SeedResult:
    method: str
    R: int
    seeds: list[int] = field(default_factory=list)
    gains: list[int] = field(default_factory=list)
    stats: EvalStats = field(default_factory=EvalStats)
    select_seconds: float = 0.0

    @property
    def mean_gains(self) -> list[float]:
        return [g / self.R for g in self.gains]

    @property
    def spread(self) -> float:
        """Sketch estimate of the spread of the whole seed set."""
        return sum(self.gains) / self.R


class _Meter:
    """Attribute sketch-set counter deltas to phases of a run."""

    def __init__(self, sketches: SketchSet):
        self.sketches = sketches
        self.mark()

    def mark(self):
        self._evals = self.sketches.evaluations
        self._visits = self.sketches.bfs_visits

    def take(self) -> tuple[int, int]:
        e = self.sketches.evaluations - self._evals
        v = self.sketches.bfs_visits - self._visits
        self.mark()
        return e, v


def init_scores(sketches: SketchSet) -> StaleScores:
    if sketches.seeds:
        raise ValueError("initial scores need an empty seed set")
    return StaleScores(sketches.marginal_many(np.arange(sketches.n)).tolist())


def _frontier(start: np.ndarray, score: int, vertex: int) -> int:
    """Vertices whose start-of-round stale key is at least ``(score, vertex)``."""
    ids = np.arange(len(start))
    return int(np.count_nonzero((start > score) | ((start == score) & (ids <= vertex))))


class _Run:
    """Shared bookkeeping for one selection run."""

    def __init__(self, sketches: SketchSet, k: int, method: str):
        if not 1 <= k <= sketches.n:
            raise ValueError(f"k must be in [1, n={sketches.n}], got {k}")
        self.sketches = sketches
        self.k = k
        self.result = SeedResult(method, sketches.R)
        self.meter = _Meter(sketches)
        self._t0 = time.perf_counter()
        self.scores = init_scores(sketches)
        st = self.result.stats
        st.initial_evaluations, st.bfs_visits_initial = self.meter.take()
        self._start = None

    def begin_round(self):
        self._start = self.scores.snapshot()

    def accept(self, seed: int, gain: int):
        st = self.result.stats
        evals, visits = self.meter.take()
        st.round_evaluations.append(evals)
        st.bfs_visits_selection += visits
        st.frontier_sizes.append(_frontier(self._start, gain, seed))
        self.scores.delta[seed] = -1
        self.sketches.mark_seed(seed)
        st.bfs_visits_mark += self.meter.take()[1]
        self.result.seeds.append(seed)
        self.result.gains.append(int(gain))

    def finish(self) -> SeedResult:
        self.result.select_seconds = time.perf_counter() - self._t0
        return self.result


def select_exhaustive(sketches: SketchSet, k: int) -> SeedResult:
    run = _Run(sketches, k, "exhaustive")
    alive = np.ones(sketches.n, dtype=bool)
    for _ in range(k):
        run.begin_round()
        cand = np.flatnonzero(alive)
        sums = sketches.marginal_many(cand)
        best = int(sums.max())
        seed = int(cand[np.flatnonzero(sums == best)[0]])
        for v, s in zip(cand.tolist(), sums.tolist()):
            run.scores.delta[v] = s
        alive[seed] = False
        run.accept(seed, best)
    return run.finish()


def select_celf(sketches: SketchSet, k: int) -> SeedResult:
    run = _Run(sketches, k, "celf")
    delta = run.scores.delta
    heap = [(-s, v) for v, s in enumerate(delta)]
    heapq.heapify(heap)
    for _ in range(k):
        run.begin_round()
        while True:
            _, v = heapq.heappop(heap)
            s = sketches.marginal(v)
            delta[v] = s
            if not heap or (-s, v) < heap[0]:
                break
            heapq.heappush(heap, (-s, v))
        run.accept(v, s)
    return run.finish()


def select_ptree(sketches: SketchSet, k: int) -> SeedResult:
    run = _Run(sketches, k, "ptree")
    delta = run.scores.delta
    tree = OrderedScoreTree(ScoreKey(s, v) for v, s in enumerate(delta))
    for _ in range(k):
        run.begin_round()
        extracted: list[ScoreKey] = []
        best: ScoreKey | None = None
        size = 1
        while True:
            batch = tree.split_and_remove(size)
            if not batch:
                break
            vs = [key.vertex for key in batch]
            sums = sketches.marginal_many(vs).tolist()
            for v, s in zip(vs, sums):
                delta[v] = s
                fresh = ScoreKey(s, v)
                extracted.append(fresh)
                if fresh.beats(best):
                    best = fresh
            top = tree.max()
            if top is None or best.beats(top):
                break
            size *= 2
        tree.batch_insert(key for key in extracted if key.vertex != best.vertex)
        run.accept(best.vertex, best.score)
    return run.finish()


def select_wintree(sketches: SketchSet, k: int) -> SeedResult:
    run = _Run(sketches, k, "wintree")
    delta = run.scores.delta
    wt = WinTree(delta)
    # forked branches already run concurrently; keep each probe single-threaded
    single = 1 if sketches.threads > 1 else None

    def evaluate(v: int) -> int:
        return sketches.marginal(v, single)

    for _ in range(k):
        run.begin_round()
        seed = wt.find_max(evaluate, BestCell(), threads=sketches.threads)
        gain = delta[seed]
        wt.remove(seed)
        run.accept(seed, gain)
    return run.finish()


SELECTORS = {
    "exhaustive": select_exhaustive,
    "celf": select_celf,
    "ptree": select_ptree,
    "wintree": select_wintree,
}


def select(sketches: SketchSet, k: int, method: str = "wintree") -> SeedResult:
    try:
        fn = SELECTORS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(SELECTORS)}") from None
    return fn(sketches, k)
