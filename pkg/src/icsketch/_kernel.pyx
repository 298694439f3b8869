# cython: language_level=3
"""Compiled sketch kernel: edge sampling, union-find sketch construction and
the center-seeking BFS probe.

Mirrors ``_kernel_py.SketchKernel`` exactly; the two are interchangeable and
must agree bit-for-bit.
"""
import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.stdint cimport int64_t, uint8_t, uint32_t, uint64_t
from libc.stdlib cimport free, malloc, realloc

cnp.import_array()

DEF MODEL_CONSTANT = 0
DEF MODEL_UNIFORM = 1
DEF MODEL_DEGREE = 2

cdef double TWO_64 = 18446744073709551616.0
cdef double INV_TWO_64 = 5.421010862427522e-20


cdef inline uint64_t mix64(uint64_t x) noexcept nogil:
    x = x + 0x9E3779B97F4A7C15ULL
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL
    return x ^ (x >> 31)


def py_mix64(x):
    return mix64(<uint64_t>x)


cdef struct GraphView:
    int64_t n
    const int64_t* offsets
    const uint32_t* nbrs
    int kind
    double pa
    double pb
    # constant model: 0 hash test, 1 always, 2 never
    int const_mode
    uint64_t const_thr


cdef inline bint sampled(const GraphView* g, int64_t u, int64_t v, uint64_t hr) noexcept nogil:
    cdef uint64_t key, hk
    cdef double p
    if u > v:
        u, v = v, u
    if g.kind == MODEL_CONSTANT:
        if g.const_mode == 1:
            return True
        if g.const_mode == 2:
            return False
        key = (<uint64_t>u << 32) | <uint64_t>v
        return mix64(hr ^ mix64(key)) < g.const_thr
    key = (<uint64_t>u << 32) | <uint64_t>v
    hk = mix64(key)
    if g.kind == MODEL_UNIFORM:
        p = g.pa + (g.pb - g.pa) * ((<double>hk) * INV_TWO_64)
    else:
        p = 2.0 / <double>((g.offsets[u + 1] - g.offsets[u]) + (g.offsets[v + 1] - g.offsets[v]))
    if p >= 1.0:
        return True
    if p <= 0.0:
        return False
    return mix64(hr ^ hk) < <uint64_t>(p * TWO_64)


# ---------------------------------------------------------------- BFS probe

cdef struct VSet:
    int64_t* slots
    int64_t mask
    int64_t count


cdef inline int64_t vset_slot(int64_t x, int64_t mask) noexcept nogil:
    return <int64_t>(((<uint64_t>x) * 0x9E3779B97F4A7C15ULL) >> 17) & mask


cdef int vset_init(VSet* s, int64_t cap) noexcept nogil:
    cdef int64_t i
    s.slots = <int64_t*>malloc(cap * sizeof(int64_t))
    if s.slots == NULL:
        return -1
    for i in range(cap):
        s.slots[i] = -1
    s.mask = cap - 1
    s.count = 0
    return 0


cdef int vset_grow(VSet* s) noexcept nogil:
    cdef int64_t oldcap = s.mask + 1
    cdef int64_t* old = s.slots
    cdef int64_t i, j, x
    if vset_init(s, oldcap * 2) != 0:
        s.slots = old
        return -1
    for i in range(oldcap):
        x = old[i]
        if x >= 0:
            j = vset_slot(x, s.mask)
            while s.slots[j] >= 0:
                j = (j + 1) & s.mask
            s.slots[j] = x
            s.count += 1
    free(old)
    return 0


cdef inline int vset_add(VSet* s, int64_t x) noexcept nogil:
    """1 if ``x`` was inserted, 0 if already present, -1 on allocation failure."""
    cdef int64_t j
    if (s.count + 1) * 2 > s.mask + 1:
        if vset_grow(s) != 0:
            return -1
    j = vset_slot(x, s.mask)
    while s.slots[j] >= 0:
        if s.slots[j] == x:
            return 0
        j = (j + 1) & s.mask
    s.slots[j] = x
    s.count += 1
    return 1


cdef struct Probe:
    int64_t delta
    int64_t label
    int64_t visits


cdef Probe get_center_c(const GraphView* g, const int64_t* center_index,
                        const uint8_t* seed_flag, const int64_t* label_r,
                        const int64_t* size_r, uint64_t hr, int64_t v) noexcept nogil:
    cdef Probe out
    cdef VSet seen
    cdef int64_t* queue
    cdef int64_t* grown
    cdef int64_t qcap = 16, head = 0, tail = 0
    cdef int64_t x, y, e, ci, lab
    cdef bint seed_seen = False
    cdef int rc
    out.delta = -1
    out.label = -1
    out.visits = 0
    queue = <int64_t*>malloc(qcap * sizeof(int64_t))
    if queue == NULL or vset_init(&seen, 32) != 0:
        free(queue)
        return out
    vset_add(&seen, v)
    queue[tail] = v
    tail += 1
    while head < tail:
        x = queue[head]
        head += 1
        ci = center_index[x]
        if ci >= 0:
            lab = label_r[ci]
            out.delta = size_r[lab]
            out.label = lab
            out.visits = head
            free(queue)
            free(seen.slots)
            return out
        if seed_flag[x]:
            seed_seen = True
        for e in range(g.offsets[x], g.offsets[x + 1]):
            y = g.nbrs[e]
            if not sampled(g, x, y, hr):
                continue
            rc = vset_add(&seen, y)
            if rc == 0:
                continue
            if rc < 0:
                head = tail
                break
            if tail == qcap:
                grown = <int64_t*>realloc(queue, 2 * qcap * sizeof(int64_t))
                if grown == NULL:
                    head = tail
                    break
                queue = grown
                qcap *= 2
            queue[tail] = y
            tail += 1
    out.visits = head
    out.delta = 0 if seed_seen else tail
    free(queue)
    free(seen.slots)
    return out


# ---------------------------------------------------------- sketch building

cdef inline int64_t uf_find(int64_t* parent, int64_t x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


cdef int build_one(const GraphView* g, const int64_t* centers, int64_t rho,
                   uint64_t hr, int64_t* label_r, int64_t* size_r) noexcept nogil:
    cdef int64_t n = g.n
    cdef int64_t* parent = <int64_t*>malloc(n * sizeof(int64_t))
    cdef int64_t* csize = <int64_t*>malloc(n * sizeof(int64_t))
    cdef int64_t* rep = <int64_t*>malloc(n * sizeof(int64_t))
    cdef int64_t u, v, e, a, b, i, root
    if parent == NULL or csize == NULL or rep == NULL:
        free(parent)
        free(csize)
        free(rep)
        return -1
    for u in range(n):
        parent[u] = u
        csize[u] = 1
        rep[u] = -1
    for u in range(n):
        for e in range(g.offsets[u], g.offsets[u + 1]):
            v = g.nbrs[e]
            if v <= u or not sampled(g, u, v, hr):
                continue
            a = uf_find(parent, u)
            b = uf_find(parent, v)
            if a == b:
                continue
            if csize[a] < csize[b]:
                a, b = b, a
            parent[b] = a
            csize[a] += csize[b]
    for i in range(rho):
        root = uf_find(parent, centers[i])
        if rep[root] < 0:
            rep[root] = i
            label_r[i] = i
            size_r[i] = csize[root]
        else:
            label_r[i] = rep[root]
            size_r[i] = 0
    free(parent)
    free(csize)
    free(rep)
    return 0


cdef class SketchKernel:
    """R compressed sketches over one graph, one probability model and one
    shared center set.

    ``labels`` and ``sizes`` are ``(R, rho)`` int64 arrays; ``seed_flag`` is a
    per-vertex uint8 array. All three are exposed for inspection.
    """

    cdef GraphView g
    cdef readonly object offsets, neighbors, centers, center_index
    cdef readonly object labels, sizes, seed_flag
    cdef readonly int64_t R, rho, n
    cdef const int64_t[::1] _center_index
    cdef const int64_t[::1] _centers
    cdef int64_t[:, ::1] _labels
    cdef int64_t[:, ::1] _sizes
    cdef uint8_t[::1] _seed_flag
    cdef uint64_t[::1] _hr

    backend = "compiled"

    def __init__(self, offsets, neighbors, int kind, double pa, double pb,
                 centers, center_index, int64_t R, uint64_t first_id=0):
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self.neighbors = np.ascontiguousarray(neighbors, dtype=np.uint32)
        cdef const int64_t[::1] off = self.offsets
        cdef const uint32_t[::1] nb = self.neighbors
        self.n = off.shape[0] - 1
        self.R = R
        self.centers = np.ascontiguousarray(centers, dtype=np.int64)
        self.center_index = np.ascontiguousarray(center_index, dtype=np.int64)
        self._centers = self.centers
        self._center_index = self.center_index
        self.rho = self.centers.shape[0]
        self.labels = np.zeros((R, self.rho), dtype=np.int64)
        self.sizes = np.zeros((R, self.rho), dtype=np.int64)
        self.seed_flag = np.zeros(self.n, dtype=np.uint8)
        self._labels = self.labels
        self._sizes = self.sizes
        self._seed_flag = self.seed_flag
        self._hr = np.array([mix64(first_id + <uint64_t>r) for r in range(R)], dtype=np.uint64)

        self.g.n = self.n
        self.g.offsets = &off[0]
        self.g.nbrs = &nb[0] if nb.shape[0] > 0 else NULL
        self.g.kind = kind
        self.g.pa = pa
        self.g.pb = pb
        self.g.const_mode = 0
        self.g.const_thr = 0
        if kind == MODEL_CONSTANT:
            if pa >= 1.0:
                self.g.const_mode = 1
            elif pa <= 0.0:
                self.g.const_mode = 2
            else:
                self.g.const_thr = <uint64_t>(pa * TWO_64)

    def build(self, int nthreads=1):
        """Compute labels and sizes for every sketch; clears seeds."""
        cdef int64_t r
        cdef int failed = 0
        cdef int64_t* lab = &self._labels[0, 0] if self.rho > 0 else NULL
        cdef int64_t* siz = &self._sizes[0, 0] if self.rho > 0 else NULL
        cdef const int64_t* cen = &self._centers[0] if self.rho > 0 else NULL
        self.seed_flag[:] = 0
        if self.rho == 0:
            return
        with nogil:
            for r in prange(self.R, num_threads=max(nthreads, 1), schedule="dynamic"):
                if build_one(&self.g, cen, self.rho, self._hr[r],
                             lab + r * self.rho, siz + r * self.rho) != 0:
                    failed += 1
        if failed:
            raise MemoryError("sketch construction ran out of memory")

    cdef inline Probe _probe(self, int64_t r, int64_t v) noexcept nogil:
        cdef const int64_t* lab = NULL
        cdef const int64_t* siz = NULL
        if self.rho > 0:
            lab = &self._labels[r, 0]
            siz = &self._sizes[r, 0]
        return get_center_c(&self.g, &self._center_index[0], &self._seed_flag[0],
                            lab, siz, self._hr[r], v)

    def get_center(self, int64_t r, int64_t v):
        """``(delta, label, visits)`` for vertex ``v`` on sketch ``r``."""
        cdef Probe p
        self._check(v)
        if r < 0 or r >= self.R:
            raise IndexError("sketch id out of range")
        with nogil:
            p = self._probe(r, v)
        if p.delta < 0:
            raise MemoryError("BFS ran out of memory")
        return p.delta, p.label, p.visits

    def marginal(self, int64_t v, int nthreads=1):
        """``(sum of deltas over all sketches, BFS visits)``."""
        cdef int64_t r, total = 0, visits = 0
        cdef int fail = 0
        cdef Probe p
        self._check(v)
        with nogil:
            for r in prange(self.R, num_threads=max(nthreads, 1), schedule="static"):
                p = self._probe(r, v)
                if p.delta < 0:
                    fail += 1
                total += p.delta
                visits += p.visits
        if fail:
            raise MemoryError("BFS ran out of memory")
        return total, visits

    def marginal_many(self, vertices, int nthreads=1):
        """Marginal sums for many vertices, parallel over the vertices."""
        cdef const int64_t[::1] vs = np.ascontiguousarray(vertices, dtype=np.int64)
        cdef int64_t cnt = vs.shape[0]
        out = np.zeros(cnt, dtype=np.int64)
        cdef int64_t[::1] o = out
        cdef int64_t i, r, acc, visits = 0
        cdef int fail = 0
        cdef Probe p
        for i in range(cnt):
            self._check(vs[i])
        with nogil:
            for i in prange(cnt, num_threads=max(nthreads, 1), schedule="dynamic"):
                acc = 0
                for r in range(self.R):
                    p = self._probe(r, vs[i])
                    if p.delta < 0:
                        fail += 1
                    acc = acc + p.delta
                    visits += p.visits
                o[i] = acc
        if fail:
            raise MemoryError("BFS ran out of memory")
        return out, visits

    def deltas(self, int64_t v):
        """Per-sketch deltas of ``v`` as an ``(R,)`` array, plus visits."""
        out = np.zeros(self.R, dtype=np.int64)
        cdef int64_t[::1] o = out
        cdef int64_t r, visits = 0
        cdef Probe p
        self._check(v)
        with nogil:
            for r in range(self.R):
                p = self._probe(r, v)
                o[r] = p.delta
                visits += p.visits
        return out, visits

    def mark_seed(self, int64_t s, int nthreads=1):
        """Zero the CC size reachable from ``s`` on every sketch, flag ``s``."""
        cdef int64_t r, visits = 0
        cdef Probe p
        self._check(s)
        with nogil:
            for r in prange(self.R, num_threads=max(nthreads, 1), schedule="static"):
                p = self._probe(r, s)
                if p.label >= 0:
                    self._sizes[r, p.label] = 0
                visits += p.visits
        self._seed_flag[s] = 1
        return visits

    cdef _check(self, int64_t v):
        if v < 0 or v >= self.n:
            raise IndexError(f"vertex {v} out of range")
