"""Compressed connectivity sketches.

A sketch memoizes, for one implicit sampled graph, which connected component
each *center* vertex lies in (``label``) and how large that component is
(``size``). Any other vertex recovers its component by a local BFS that stops
at the first center it meets. Fewer centers means less memory and longer
probes; the answers never change.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .graph import Graph, ProbabilityModel

SKETCH_WORD_BYTES = 8


@dataclass(frozen=True, eq=False)
class CenterSet:
    alpha: float
    centers: np.ndarray
    center_index: np.ndarray

    @property
    def rho(self) -> int:
        return len(self.centers)

    @property
    def is_center(self) -> np.ndarray:
        return self.center_index >= 0


def center_count(n: int, alpha: float) -> int:
    """``round(alpha * n)`` with halves rounded up, clamped to ``[0, n]``."""
    return min(n, max(0, int(math.floor(alpha * n + 0.5))))


def select_centers(g: Graph, alpha: float, rng_seed: int = 0) -> CenterSet:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    rho = center_count(g.n, alpha)
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    # numpy's permutation is a Fisher-Yates shuffle; its prefix is a uniform
    # sample without replacement
    centers = rng.permutation(g.n)[:rho].astype(np.int64)
    index = np.full(g.n, -1, dtype=np.int64)
    index[centers] = np.arange(rho, dtype=np.int64)
    return CenterSet(float(alpha), centers, index)


@dataclass
class EvalStats:
    """Counters for one selection run.

    ``round_evaluations[i]`` and ``frontier_sizes[i]`` refer to the round
    selecting seed ``i``; the frontier is the set of vertices whose stale
    score at round start was at least the winning true score.
    """

    initial_evaluations: int = 0
    round_evaluations: list[int] = field(default_factory=list)
    frontier_sizes: list[int] = field(default_factory=list)
    bfs_visits_initial: int = 0
    bfs_visits_selection: int = 0
    bfs_visits_mark: int = 0

    @property
    def selection_evaluations(self) -> int:
        return sum(self.round_evaluations)

    @property
    def total_evaluations(self) -> int:
        return self.initial_evaluations + self.selection_evaluations

    @property
    def bfs_visits(self) -> int:
        return self.bfs_visits_initial + self.bfs_visits_selection + self.bfs_visits_mark

    def as_dict(self) -> dict:
        return {
            "initial": self.initial_evaluations,
            "per_round": list(self.round_evaluations),
            "selection_total": self.selection_evaluations,
            "total": self.total_evaluations,
            "frontier_sizes": list(self.frontier_sizes),
            "bfs_visits": {
                "initial": self.bfs_visits_initial,
                "selection": self.bfs_visits_selection,
                "mark_seed": self.bfs_visits_mark,
                "total": self.bfs_visits,
            },
        }


class SketchSet:
    """``R`` sketches sharing one center set, plus the current seed set.

    Scores are exchanged as integer sums over the ``R`` sketches; divide by
    ``R`` only for display (:meth:`mean`).
    """

    def __init__(
        self,
        g: Graph,
        model: ProbabilityModel,
        R: int,
        centers: CenterSet,
        threads: int = 1,
        backend: str | None = None,
        first_id: int = 0,
    ):
        if R < 1:
            raise ValueError("R must be at least 1")
        if len(centers.center_index) != g.n:
            raise ValueError("center set belongs to a different graph")
        self.graph = g
        self.model = model
        self.R = int(R)
        self.centers = centers
        self.threads = max(1, int(threads))
        self.first_id = int(first_id)
        cls = _backend.kernel_class(backend)
        pa, pb = model.params
        self.kernel = cls(g.offsets, g.neighbors, model.kind, pa, pb, centers.centers, centers.center_index, self.R, self.first_id)
        self.seeds: list[int] = []
        self._seed_set: set[int] = set()
        self.evaluations = 0
        self.bfs_visits = 0
        self._lock = threading.Lock()
        self.kernel.build(self.threads)

    @classmethod
    def build(cls, g, model, R=256, alpha=1.0, rng_seed=0, threads=1, backend=None) -> "SketchSet":
        return cls(g, model, R, select_centers(g, alpha, rng_seed), threads, backend)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def backend(self) -> str:
        return self.kernel.backend

    @property
    def labels(self) -> np.ndarray:
        return self.kernel.labels

    @property
    def sizes(self) -> np.ndarray:
        return self.kernel.sizes

    def memory_bytes(self) -> int:
        """Sketch storage: two words per (sketch, center) plus one flag bit per vertex."""
        return sketch_memory_bytes(self.n, self.R, self.centers.rho)

    def reset(self) -> None:
        """Rebuild all sketches and forget the seeds (counters keep running)."""
        self.kernel.build(self.threads)
        self.seeds = []
        self._seed_set = set()

    def _count(self, evaluations: int, visits: int) -> None:
        with self._lock:
            self.evaluations += evaluations
            self.bfs_visits += visits

    def is_seed(self, v: int) -> bool:
        return v in self._seed_set

    def get_center(self, r: int, v: int) -> tuple[int, int]:
        """``(delta, label)`` of ``v`` on sketch ``r``; label is -1 when no
        center shares ``v``'s component."""
        delta, label, visits = self.kernel.get_center(r, v)
        self._count(0, visits)
        return delta, label

    def probe(self, r: int, v: int) -> tuple[int, int, int]:
        """Like :meth:`get_center` but also returns the BFS visit count."""
        delta, label, visits = self.kernel.get_center(r, v)
        self._count(0, visits)
        return delta, label, visits

    def marginal(self, v: int, threads: int | None = None) -> int:
        """Sum over sketches of ``v``'s marginal gain given the current seeds."""
        total, visits = self.kernel.marginal(v, self.threads if threads is None else threads)
        self._count(1, visits)
        return int(total)

    def marginal_many(self, vertices) -> np.ndarray:
        vs = np.asarray(vertices, dtype=np.int64)
        if len(vs) == 0:
            return np.zeros(0, dtype=np.int64)
        sums, visits = self.kernel.marginal_many(vs, self.threads)
        self._count(len(vs), visits)
        return sums

    def deltas(self, v: int) -> np.ndarray:
        """Per-sketch marginal gains of ``v`` (not counted as an evaluation)."""
        out, visits = self.kernel.deltas(v)
        self._count(0, visits)
        return out

    def mean(self, total: int) -> float:
        return total / self.R

    def mark_seed(self, s: int) -> None:
        if s in self._seed_set:
            raise ValueError(f"{s} is already a seed")
        visits = self.kernel.mark_seed(s, self.threads)
        self._count(0, visits)
        self.seeds.append(int(s))
        self._seed_set.add(int(s))

    def estimate_sigma(self, seeds, first_id: int | None = None) -> tuple[float, float]:
        """Sketch estimate of the spread of ``seeds`` and its standard error.

        Runs on a fresh copy of the sketches (this set is not modified). Pass
        ``first_id`` to score on independent sampled graphs instead, e.g. to
        avoid the optimistic bias of scoring seeds on the sketches that
        chose them.
        """
        fid = self.first_id if first_id is None else first_id
        fresh = SketchSet(self.graph, self.model, self.R, self.centers, self.threads, self.backend, fid)
        per_sketch = np.zeros(self.R, dtype=np.int64)
        for s in seeds:
            per_sketch += fresh.deltas(s)
            fresh.mark_seed(s)
        mean = float(per_sketch.mean())
        se = float(per_sketch.std(ddof=1) / math.sqrt(self.R)) if self.R > 1 else 0.0
        return mean, se


def sketch_memory_bytes(n: int, R: int, rho: int) -> int:
    return R * rho * 2 * SKETCH_WORD_BYTES + (n + 7) // 8
