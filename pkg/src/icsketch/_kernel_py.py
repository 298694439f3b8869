"""Pure-Python sketch kernel, used when the compiled extension is missing.

Same constructor, attributes and methods as the compiled ``SketchKernel``.
Results are identical; only speed differs. ``nthreads`` is accepted and
ignored. Components come from scipy rather than a hand-written union-find.
"""
from __future__ import annotations

from collections import OrderedDict, deque

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .sampling import ALWAYS, TWO_64, INV_TWO_64, MASK64, mix64, mix64_array


_CACHE: OrderedDict = OrderedDict()
_CACHE_SIZE = 4
_BLOCK_SLOTS = 1 << 21
_ADJ_CACHE_SLOTS = 1 << 23


def _prepare(offsets, neighbors, kind, pa, pb):
    """Per-CSR-slot hashes and thresholds plus list views for the BFS loop.

    Depends only on the graph and the model, so it is cached for the last
    few graphs. The cache holds the arrays themselves, which keeps their
    buffer addresses from being reused while an entry is alive.
    """
    key = (offsets.ctypes.data, neighbors.ctypes.data, len(offsets), len(neighbors), kind, pa, pb)
    hit = _CACHE.get(key)
    if hit is not None and hit[0] is offsets and hit[1] is neighbors:
        _CACHE.move_to_end(key)
        return hit[2]
    n = len(offsets) - 1
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(offsets))
    dst = neighbors.astype(np.int64)
    lo = np.minimum(src, dst).astype(np.uint64)
    hi = np.maximum(src, dst).astype(np.uint64)
    hk = mix64_array((lo << np.uint64(32)) | hi)
    if kind == 0:
        p = np.full(len(dst), float(pa))
    elif kind == 1:
        p = pa + (pb - pa) * (hk.astype(np.float64) * INV_TWO_64)
    else:
        deg = np.diff(offsets)
        p = 2.0 / (deg[src] + deg[dst]).astype(np.float64)
    always = p >= 1.0
    thr = (np.where(always | (p <= 0.0), 0.0, p) * TWO_64).astype(np.uint64)
    # ALWAYS beats every hash in the scalar comparison
    thr_list = thr.tolist()
    for i in np.flatnonzero(always).tolist():
        thr_list[i] = ALWAYS
    bounds = offsets.tolist()
    adj = [neighbors[bounds[v] : bounds[v + 1]].tolist() for v in range(n)]
    thr_rows = [thr_list[bounds[v] : bounds[v + 1]] for v in range(n)]
    hk_list = hk.tolist()
    hk_rows = [hk_list[bounds[v] : bounds[v + 1]] for v in range(n)]
    prep = (hk, thr, always, src, dst, adj, thr_rows, hk_rows)
    _CACHE[key] = (offsets, neighbors, prep)
    while len(_CACHE) > _CACHE_SIZE:
        _CACHE.popitem(last=False)
    return prep


class SketchKernel:
    backend = "python"

    def __init__(self, offsets, neighbors, kind, pa, pb, centers, center_index, R, first_id=0):
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self.neighbors = np.ascontiguousarray(neighbors, dtype=np.uint32)
        self.n = len(self.offsets) - 1
        self.R = int(R)
        self.centers = np.ascontiguousarray(centers, dtype=np.int64)
        self.center_index = np.ascontiguousarray(center_index, dtype=np.int64)
        self.rho = len(self.centers)
        self.labels = np.zeros((self.R, self.rho), dtype=np.int64)
        self.sizes = np.zeros((self.R, self.rho), dtype=np.int64)
        self.seed_flag = np.zeros(self.n, dtype=np.uint8)
        self._hr = [mix64((first_id + r) & MASK64) for r in range(self.R)]
        prep = _prepare(self.offsets, self.neighbors, kind, pa, pb)
        self._slot_hash, self._slot_thr, self._slot_always, self._src, self._dst, self._adj, self._thr, self._hk = prep
        self._upper = self._src < self._dst
        self._cidx = self.center_index.tolist()
        self._sadj: dict[int, list] = {}
        self._probed: set[int] = set()
        self._cache_adj = self.R * len(self._dst) <= _ADJ_CACHE_SLOTS

    def _sampled_mask(self, r):
        return self._slot_always | (mix64_array(self._slot_hash ^ np.uint64(self._hr[r])) < self._slot_thr)

    def build(self, nthreads=1):
        self.seed_flag[:] = 0
        if self.rho == 0:
            return
        # a block of sketches is solved as one block-diagonal graph
        src = self._src[self._upper]
        dst = self._dst[self._upper]
        hk = self._slot_hash[self._upper]
        thr = self._slot_thr[self._upper]
        always = self._slot_always[self._upper]
        hr = np.array(self._hr, dtype=np.uint64)
        n, rho = self.n, self.rho
        block = max(1, min(self.R, _BLOCK_SLOTS // max(len(src), 1), _BLOCK_SLOTS // max(n, 1)))
        ids = np.arange(rho)
        for r0 in range(0, self.R, block):
            b = min(block, self.R - r0)
            keep = always[None, :] | (mix64_array(hk[None, :] ^ hr[r0 : r0 + b, None]) < thr[None, :])
            t, e = np.nonzero(keep)
            adj = coo_matrix(
                (np.ones(len(e), dtype=np.int8), (t * n + src[e], t * n + dst[e])),
                shape=(b * n, b * n),
            )
            _, comp = connected_components(adj, directed=False)
            csize = np.bincount(comp)
            cc = comp.reshape(b, n)[:, self.centers]
            # smallest center index sharing each component
            rep = np.full(csize.shape[0], rho, dtype=np.int64)
            np.minimum.at(rep, cc.ravel(), np.tile(ids, b))
            lab = rep[cc]
            self.labels[r0 : r0 + b] = lab
            self.sizes[r0 : r0 + b] = np.where(lab == ids[None, :], csize[cc], 0)

    def _sampled_adj(self, r):
        """Neighbor lists of sampled graph ``r`` in CSR order, or None when
        caching every sketch's lists would exceed the memory budget. Built on
        the second probe of a sketch, so one-off probes skip the setup."""
        lists = self._sadj.get(r)
        if lists is None and self._cache_adj:
            if r not in self._probed:
                self._probed.add(r)
                return None
            keep = self._sampled_mask(r)
            nb = self._dst[keep].tolist()
            ends = np.cumsum(np.bincount(self._src[keep], minlength=self.n)).tolist()
            lists = []
            start = 0
            for end in ends:
                lists.append(nb[start:end])
                start = end
            self._sadj[r] = lists
        return lists

    def _probe(self, r, v):
        cidx = self._cidx
        seeds = self.seed_flag
        seen = {v}
        queue = deque([v])
        visits = 0
        seed_seen = False
        lists = self._sampled_adj(r)
        hr = self._hr[r]
        while queue:
            x = queue.popleft()
            visits += 1
            ci = cidx[x]
            if ci >= 0:
                lab = int(self.labels[r, ci])
                return int(self.sizes[r, lab]), lab, visits
            if seeds[x]:
                seed_seen = True
            if lists is not None:
                for y in lists[x]:
                    if y not in seen:
                        seen.add(y)
                        queue.append(y)
            else:
                for y, h, t in zip(self._adj[x], self._hk[x], self._thr[x]):
                    if y not in seen and mix64(hr ^ h) < t:
                        seen.add(y)
                        queue.append(y)
        return (0 if seed_seen else len(seen)), -1, visits

    def _check(self, v):
        if v < 0 or v >= self.n:
            raise IndexError(f"vertex {v} out of range")

    def get_center(self, r, v):
        self._check(v)
        if r < 0 or r >= self.R:
            raise IndexError("sketch id out of range")
        return self._probe(r, int(v))

    def marginal(self, v, nthreads=1):
        self._check(v)
        total = visits = 0
        for r in range(self.R):
            d, _, vis = self._probe(r, int(v))
            total += d
            visits += vis
        return total, visits

    def marginal_many(self, vertices, nthreads=1):
        vs = np.asarray(vertices, dtype=np.int64)
        out = np.zeros(len(vs), dtype=np.int64)
        visits = 0
        for i, v in enumerate(vs.tolist()):
            out[i], vis = self.marginal(v)
            visits += vis
        return out, visits

    def deltas(self, v):
        self._check(v)
        out = np.zeros(self.R, dtype=np.int64)
        visits = 0
        for r in range(self.R):
            out[r], _, vis = self._probe(r, int(v))
            visits += vis
        return out, visits

    def mark_seed(self, s, nthreads=1):
        self._check(s)
        visits = 0
        for r in range(self.R):
            _, lab, vis = self._probe(r, int(s))
            if lab >= 0:
                self.sizes[r, lab] = 0
            visits += vis
        self.seed_flag[s] = 1
        return visits
