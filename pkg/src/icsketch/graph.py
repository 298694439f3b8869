"""Immutable undirected graphs in CSR form and edge-probability models."""
from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .sampling import INV_TWO_64, edge_key, edge_key_array, mix64, mix64_array

MAX_VERTEX_ID = 1 << 32


class GraphFormatError(ValueError):
    """Malformed graph input."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(ValueError):
    """Input exceeds a representational limit (32-bit ids, enumeration size)."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph.

    ``offsets`` has length ``n + 1``; ``neighbors[offsets[v]:offsets[v+1]]``
    is the ascending neighbor list of ``v``. Every undirected edge is stored
    twice, once per endpoint.
    """

    offsets: np.ndarray
    neighbors: np.ndarray

    def __post_init__(self):
        off = np.ascontiguousarray(self.offsets, dtype=np.int64)
        nb = np.ascontiguousarray(self.neighbors, dtype=np.uint32)
        off.setflags(write=False)
        nb.setflags(write=False)
        object.__setattr__(self, "offsets", off)
        object.__setattr__(self, "neighbors", nb)

    @property
    def n(self) -> int:
        return len(self.offsets) - 1

    @property
    def m(self) -> int:
        return len(self.neighbors) // 2

    def degree(self, v: int) -> int:
        return int(self.offsets[v + 1] - self.offsets[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def neighbors_of(self, v: int) -> np.ndarray:
        return self.neighbors[self.offsets[v] : self.offsets[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors_of(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Canonical edge list: arrays ``(u, v)`` with ``u < v``, sorted."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        dst = self.neighbors.astype(np.int64)
        keep = src < dst
        return src[keep], dst[keep]

    def validate(self) -> None:
        off, nb = self.offsets, self.neighbors
        if off[0] != 0 or off[-1] != len(nb) or np.any(np.diff(off) < 0):
            raise GraphFormatError("offsets are not a valid prefix sum")
        if len(nb) % 2:
            raise GraphFormatError("neighbor array has odd length")
        for v in range(self.n):
            row = self.neighbors_of(v)
            if len(row) and (np.any(np.diff(row.astype(np.int64)) <= 0) or np.any(row == v)):
                raise GraphFormatError(f"neighbor list of {v} unsorted, duplicated or self-looped")
        u, w = self.edges()
        if 2 * len(u) != len(nb):
            raise GraphFormatError("adjacency is not symmetric")
        for a, b in zip(u.tolist(), w.tolist()):
            if not self.has_edge(b, a):
                raise GraphFormatError(f"edge ({a}, {b}) missing its reverse")

    @classmethod
    def from_edges(cls, n: int, us, vs) -> "Graph":
        """Build from endpoint arrays; symmetrizes, drops loops, dedupes."""
        us = np.asarray(us, dtype=np.int64).ravel()
        vs = np.asarray(vs, dtype=np.int64).ravel()
        if len(us) != len(vs):
            raise ValueError("endpoint arrays differ in length")
        if n > MAX_VERTEX_ID or (len(us) and max(us.max(), vs.max()) >= MAX_VERTEX_ID):
            raise CapacityError("vertex ids must fit in 32 bits")
        if len(us) and (min(us.min(), vs.min()) < 0 or max(us.max(), vs.max()) >= n):
            raise ValueError("vertex id out of range")
        keep = us != vs
        lo = np.minimum(us[keep], vs[keep])
        hi = np.maximum(us[keep], vs[keep])
        keys = np.unique(edge_key_array(lo, hi))
        lo = (keys >> np.uint64(32)).astype(np.int64)
        hi = (keys & np.uint64(0xFFFFFFFF)).astype(np.int64)
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
        return cls(offsets, dst.astype(np.uint32))


def load_edge_list(stream: TextIO | Iterable[str], directed: bool = False) -> Graph:
    """Parse whitespace-separated ``u v`` lines into a compacted graph.

    Lines starting with ``#`` or ``%`` are comments; extra columns (weights,
    timestamps) are ignored. Directed inputs are symmetrized, which is also
    what happens to undirected ones, so ``directed`` only documents intent.
    Vertex ids are relabeled to ``0..n-1`` in increasing numeric order.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    us: list[int] = []
    vs: list[int] = []
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s[0] in "#%":
            continue
        parts = s.split()
        if len(parts) < 2:
            raise GraphFormatError(f"expected 'u v', got {s!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer vertex id in {s!r}", lineno) from None
        if u < 0 or v < 0:
            raise GraphFormatError("negative vertex id", lineno)
        if u >= MAX_VERTEX_ID or v >= MAX_VERTEX_ID:
            raise CapacityError(f"line {lineno}: vertex id exceeds 32 bits")
        us.append(u)
        vs.append(v)
    raw = np.array(us + vs, dtype=np.int64)
    ids = np.unique(raw)
    half = len(us)
    compact = np.searchsorted(ids, raw)
    return Graph.from_edges(len(ids), compact[:half], compact[half:])


def read_edge_list(path, directed: bool = False) -> Graph:
    with open(path) as fh:
        return load_edge_list(fh, directed)


def write_edge_list(g: Graph, path) -> None:
    u, v = g.edges()
    with open(path, "w") as fh:
        fh.write(f"# n={g.n} m={g.m}\n")
        for a, b in zip(u.tolist(), v.tolist()):
            fh.write(f"{a} {b}\n")


_CSR_HEADER = struct.Struct("<QQ")


def write_csr(g: Graph, path) -> None:
    """Binary CSR: LE u64 ``n, m``; u64 offsets[n+1]; u32 neighbors[2m]."""
    with open(path, "wb") as fh:
        fh.write(_CSR_HEADER.pack(g.n, g.m))
        fh.write(g.offsets.astype("<u8").tobytes())
        fh.write(g.neighbors.astype("<u4").tobytes())


def read_csr(path) -> Graph:
    with open(path, "rb") as fh:
        head = fh.read(_CSR_HEADER.size)
        if len(head) != _CSR_HEADER.size:
            raise GraphFormatError("truncated CSR header")
        n, m = _CSR_HEADER.unpack(head)
        if n > MAX_VERTEX_ID:
            raise CapacityError("vertex count exceeds 32 bits")
        off_raw = fh.read(8 * (n + 1))
        nb_raw = fh.read(4 * 2 * m)
    if len(off_raw) != 8 * (n + 1) or len(nb_raw) != 8 * m:
        raise GraphFormatError("truncated CSR body")
    offsets = np.frombuffer(off_raw, dtype="<u8")
    neighbors = np.frombuffer(nb_raw, dtype="<u4")
    offsets = offsets.astype(np.int64)
    if offsets[0] != 0 or offsets[-1] != 2 * m or np.any(np.diff(offsets) < 0):
        raise GraphFormatError("corrupt CSR offsets")
    return Graph(offsets, neighbors.astype(np.uint32))


def read_graph(path, fmt: str = "edgelist") -> Graph:
    if fmt == "edgelist":
        return read_edge_list(path)
    if fmt == "csr":
        return read_csr(path)
    raise ValueError(f"unknown graph format {fmt!r}")


# --------------------------------------------------------------------------
# probability models


@dataclass(frozen=True)
class Constant:
    p: float

    kind = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")

    @property
    def params(self):
        return (float(self.p), 0.0)

    def probability(self, g: Graph, u: int, v: int) -> float:
        return float(self.p)

    def probabilities(self, g: Graph, us, vs) -> np.ndarray:
        return np.full(len(us), float(self.p))


@dataclass(frozen=True)
class UniformRange:
    """Per-edge probability ``lo + (hi - lo) * mix64(edge_key) / 2**64``."""

    lo: float
    hi: float

    kind = 1

    def __post_init__(self):
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValueError("need 0 <= lo <= hi <= 1")

    @property
    def params(self):
        return (float(self.lo), float(self.hi))

    def probability(self, g: Graph, u: int, v: int) -> float:
        return self.lo + (self.hi - self.lo) * (float(mix64(edge_key(u, v))) * INV_TWO_64)

    def probabilities(self, g: Graph, us, vs) -> np.ndarray:
        h = mix64_array(edge_key_array(us, vs)).astype(np.float64)
        return self.lo + (self.hi - self.lo) * (h * INV_TWO_64)


@dataclass(frozen=True)
class DegreeWeighted:
    """``p_uv = 2 / (deg(u) + deg(v))``."""

    kind = 2

    @property
    def params(self):
        return (0.0, 0.0)

    def probability(self, g: Graph, u: int, v: int) -> float:
        return 2.0 / float(g.degree(u) + g.degree(v))

    def probabilities(self, g: Graph, us, vs) -> np.ndarray:
        d = g.degrees()
        return 2.0 / (d[np.asarray(us)] + d[np.asarray(vs)]).astype(np.float64)


ProbabilityModel = Constant | UniformRange | DegreeWeighted


def edge_probability(g: Graph, model: ProbabilityModel, u: int, v: int) -> float:
    assert g.has_edge(u, v), f"({u}, {v}) is not an edge"
    return model.probability(g, u, v)


def parse_model(spec: str) -> ProbabilityModel:
    """``"0.02"`` / ``"const:0.02"``, ``"uniform:LO:HI"``, ``"wic"``."""
    s = spec.strip().lower()
    if s == "wic":
        return DegreeWeighted()
    if s.startswith("uniform:"):
        lo, hi = s.split(":")[1:3]
        return UniformRange(float(lo), float(hi))
    if s.startswith("const:"):
        s = s.split(":", 1)[1]
    return Constant(float(s))


# --------------------------------------------------------------------------
# generators for test corpora and benchmarks


def erdos_renyi(n: int, p: float, seed: int = 0) -> Graph:
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return Graph.from_edges(n, iu[keep], ju[keep])


def erdos_renyi_m(n: int, m: int, seed: int = 0) -> Graph:
    """Roughly ``m`` uniformly random edges (collisions and loops dropped)."""
    rng = np.random.default_rng(seed)
    u = rng.integers(0, n, size=m)
    v = rng.integers(0, n, size=m)
    return Graph.from_edges(n, u, v)


def preferential_attachment(n: int, attach: int = 3, seed: int = 0) -> Graph:
    """Barabasi-Albert style graph: each new vertex links to ``attach`` targets
    drawn proportionally to degree (with a uniform warm start)."""
    rng = np.random.default_rng(seed)
    attach = max(1, min(attach, n - 1)) if n > 1 else 1
    us, vs = [], []
    pool: list[int] = []
    for v in range(1, n):
        want = min(attach, v)
        chosen: set[int] = set()
        while len(chosen) < want:
            if pool and rng.random() < 0.9:
                t = pool[int(rng.integers(len(pool)))]
            else:
                t = int(rng.integers(v))
            chosen.add(t)
        for t in sorted(chosen):
            us.append(v)
            vs.append(t)
            pool.extend((v, t))
    return Graph.from_edges(n, us, vs)
