"""Priority structures for lazy greedy selection.

All structures order vertices by the same total order: higher score first,
smaller vertex id on ties. Internally a key is the tuple ``(score, -id)``,
so plain tuple comparison gives "better is larger".

* :class:`OrderedScoreTree`: a size-annotated treap supporting
  split-by-rank and batch insertion (split/union based).
* :class:`WinTree`: an implicit-array winning tree with pruned, optionally
  forked, search for the current true maximum.
"""
from __future__ import annotations

import sys
import threading
from typing import Callable, Iterable, NamedTuple, Sequence

from .sampling import mix64


class ScoreKey(NamedTuple):
    score: int
    vertex: int

    @property
    def order(self) -> tuple[int, int]:
        return (self.score, -self.vertex)

    def beats(self, other: "ScoreKey | None") -> bool:
        return other is None or self.order > other.order


#: minimal order tuple; loses to every real key
SENTINEL = (-(1 << 62), 0)


def key_order(score: int, vertex: int) -> tuple[int, int]:
    return (score, -vertex)


class BestCell:
    """Shared ``(score, -id)`` cell with an atomic write-max."""

    def __init__(self, value=SENTINEL):
        self._value = value
        self._lock = threading.Lock()

    def get(self) -> tuple[int, int]:
        return self._value

    def write_max(self, value) -> bool:
        if value <= self._value:
            return False
        with self._lock:
            if value > self._value:
                self._value = value
                return True
        return False


# --------------------------------------------------------------------------
# ordered score tree


class _Node:
    __slots__ = ("key", "prio", "left", "right", "size")

    def __init__(self, key, prio):
        self.key = key  # (-score, id): in-order ascending == best first
        self.prio = prio
        self.left = None
        self.right = None
        self.size = 1


def _size(t):
    return t.size if t is not None else 0


def _pull(t):
    t.size = 1 + _size(t.left) + _size(t.right)
    return t


def _split_rank(t, k):
    """First ``k`` in-order nodes, rest."""
    if t is None:
        return None, None
    if _size(t.left) >= k:
        a, b = _split_rank(t.left, k)
        t.left = b
        return a, _pull(t)
    a, b = _split_rank(t.right, k - _size(t.left) - 1)
    t.right = a
    return _pull(t), b


def _split_key(t, key):
    """Nodes with key ``< key``, nodes with key ``> key`` (keys are distinct)."""
    if t is None:
        return None, None
    if t.key < key:
        a, b = _split_key(t.right, key)
        t.right = a
        return _pull(t), b
    a, b = _split_key(t.left, key)
    t.left = b
    return a, _pull(t)


def _union(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if a.prio < b.prio:
        a, b = b, a
    lo, hi = _split_key(b, a.key)
    a.left = _union(a.left, lo)
    a.right = _union(a.right, hi)
    return _pull(a)


def _from_sorted(keys):
    """Treap over already-sorted keys, O(len) via the rightmost-spine stack."""
    spine: list[_Node] = []
    for key in keys:
        node = _Node(key, mix64(key[1]))
        last = None
        while spine and spine[-1].prio < node.prio:
            last = spine.pop()
            _pull(last)
        node.left = last
        if spine:
            spine[-1].right = node
        spine.append(node)
    while spine:
        top = spine.pop()
        _pull(top)
    return top if keys else None


def _inorder(t, out):
    stack = []
    while stack or t is not None:
        while t is not None:
            stack.append(t)
            t = t.left
        t = stack.pop()
        out.append(t.key)
        t = t.right
    return out


class OrderedScoreTree:
    """Score-ordered set of vertices with rank-split and batch insertion.

    Treap priorities are a hash of the vertex id, so the tree shape is a
    deterministic function of its contents.
    """

    def __init__(self, keys: Iterable[ScoreKey] = ()):
        keys = list(keys)
        ids = {k.vertex for k in keys}
        if len(ids) != len(keys):
            raise ValueError("duplicate vertex id")
        self._ids = ids
        self._root = _from_sorted(sorted((-k.score, k.vertex) for k in keys))

    def __len__(self) -> int:
        return _size(self._root)

    def __contains__(self, vertex: int) -> bool:
        return vertex in self._ids

    def __iter__(self):
        return (ScoreKey(-s, v) for s, v in _inorder(self._root, []))

    def max(self) -> ScoreKey | None:
        t = self._root
        if t is None:
            return None
        while t.left is not None:
            t = t.left
        return ScoreKey(-t.key[0], t.key[1])

    def split_and_remove(self, k: int) -> list[ScoreKey]:
        """Remove and return the ``min(k, len)`` best keys, best first."""
        if k <= 0 or self._root is None:
            return []
        head, self._root = _split_rank(self._root, k)
        out = [ScoreKey(-s, v) for s, v in _inorder(head, [])]
        self._ids.difference_update(k.vertex for k in out)
        return out

    def batch_insert(self, keys: Iterable[ScoreKey]) -> None:
        keys = list(keys)
        new = {k.vertex for k in keys}
        if len(new) != len(keys) or not new.isdisjoint(self._ids):
            raise ValueError("duplicate vertex id")
        self._ids |= new
        self._root = _union(self._root, _from_sorted(sorted((-k.score, k.vertex) for k in keys)))

    def check(self) -> None:
        """Assert the search-tree, heap and size invariants."""

        def walk(t, lo, hi):
            if t is None:
                return 0
            assert (lo is None or lo < t.key) and (hi is None or t.key < hi)
            for c in (t.left, t.right):
                assert c is None or c.prio <= t.prio
            s = 1 + walk(t.left, lo, t.key) + walk(t.right, t.key, hi)
            assert s == t.size
            return s

        assert walk(self._root, None, None) == len(self._ids)


# --------------------------------------------------------------------------
# winning tree

Evaluate = Callable[[int], int]


class WinTree:
    """Winning tree over vertices ``0..n-1`` keyed by a shared stale array.

    ``tree`` is a flat list of ``2 * width`` ids (slot 0 unused); leaves sit at
    ``width + v``; padding leaves hold ``-1``. ``stale[v] < 0`` marks a vertex
    as removed: it loses to every live vertex.
    """

    def __init__(self, stale: list[int]):
        self.stale = stale
        n = len(stale)
        width = 1
        while width < n:
            width *= 2
        self.n = n
        self.width = width
        tree = [-1] * (2 * width)
        tree[width : width + n] = range(n)
        self.tree = tree
        for t in range(width - 1, 0, -1):
            self._settle(t)

    def key(self, v: int) -> tuple[int, int]:
        if v < 0:
            return SENTINEL
        return (self.stale[v], -v)

    def _settle(self, t: int) -> None:
        a, b = self.tree[2 * t], self.tree[2 * t + 1]
        self.tree[t] = a if self.key(a) > self.key(b) else b

    @property
    def root(self) -> int:
        return self.tree[1]

    def remove(self, v: int) -> None:
        """Mark ``v`` removed and repair its leaf-to-root path."""
        self.stale[v] = -1
        t = (self.width + v) >> 1
        while t >= 1:
            self._settle(t)
            t >>= 1

    def check(self) -> None:
        for t in range(1, self.width):
            a, b = self.tree[2 * t], self.tree[2 * t + 1]
            assert self.tree[t] in (a, b), t
            assert self.key(self.tree[t]) >= max(self.key(a), self.key(b)), t

    def find_max(self, evaluate: Evaluate, best: BestCell | None = None, threads: int = 1, prune: bool = True) -> int:
        """Return the vertex with the largest *true* score.

        ``evaluate(v)`` must return ``v``'s true score; it is stored into
        ``stale[v]``. Stale scores must upper-bound true scores. With
        ``threads > 1`` the top ``log2(threads)`` levels fork into threads.
        """
        if best is None:
            best = BestCell()
        fork_depth = max(0, (threads - 1).bit_length())
        tree, stale, width = self.tree, self.stale, self.width

        def visit(t: int, parent_id: int, depth: int) -> None:
            v = tree[t]
            if v < 0 or stale[v] < 0:
                return  # padding or removed: nothing live below
            if t == 1 or v != parent_id:
                if prune and (stale[v], -v) < best.get():
                    return
                score = evaluate(v)
                stale[v] = score
                best.write_max((score, -v))
            if t >= width:
                return
            if depth < fork_depth:
                worker = threading.Thread(target=visit, args=(2 * t, v, depth + 1))
                worker.start()
                visit(2 * t + 1, v, depth + 1)
                worker.join()
            else:
                visit(2 * t, v, depth + 1)
                visit(2 * t + 1, v, depth + 1)
            self._settle(t)

        if self.n:
            visit(1, -2, 0)
        return tree[1]


def wt_build(stale: Sequence[int]) -> WinTree:
    return WinTree(list(stale))


sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))
