"""Reference implementations used only by the tests.

These share no code with the package beyond the public graph container:
hashing, thresholds, components and greedy selection are rewritten here in
the most direct form possible.
"""
from __future__ import annotations

from fractions import Fraction

M64 = (1 << 64) - 1


def splitmix(x):
    x = (x + 0x9E3779B97F4A7C15) & M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & M64
    return x ^ (x >> 31)


def prob(g, model, u, v):
    name = type(model).__name__
    if name == "Constant":
        return model.p
    if name == "DegreeWeighted":
        return 2.0 / (g.degree(u) + g.degree(v))
    a, b = min(u, v), max(u, v)
    return model.lo + (model.hi - model.lo) * (splitmix((a << 32) | b) * 2.0**-64)


def edge_in(g, model, u, v, r):
    p = prob(g, model, u, v)
    if p >= 1:
        return True
    cut = int(Fraction(p) * (1 << 64))
    a, b = min(u, v), max(u, v)
    return splitmix(splitmix(r & M64) ^ splitmix((a << 32) | b)) < cut


def adjacency(g):
    return [set(g.neighbors_of(v).tolist()) for v in range(g.n)]


def materialize(g, model, r):
    """Adjacency sets of sampled graph ``r``."""
    adj = [set() for _ in range(g.n)]
    for u in range(g.n):
        for v in g.neighbors_of(u).tolist():
            if u < v and edge_in(g, model, u, v, r):
                adj[u].add(v)
                adj[v].add(u)
    return adj


def components(adj):
    comp = [-1] * len(adj)
    out = []
    for s in range(len(adj)):
        if comp[s] >= 0:
            continue
        comp[s] = len(out)
        members = [s]
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if comp[y] < 0:
                    comp[y] = comp[s]
                    members.append(y)
                    stack.append(y)
        out.append(sorted(members))
    return comp, out


class Materialized:
    """All ``R`` sampled graphs, with their components, held explicitly."""

    def __init__(self, g, model, R, first_id=0):
        self.g = g
        self.R = R
        self.comps = [components(materialize(g, model, first_id + r)) for r in range(R)]

    def gain(self, v, seeds):
        total = 0
        for comp, members in self.comps:
            group = members[comp[v]]
            if not any(s in seeds for s in group):
                total += len(group)
        return total

    def sketch(self, r, centers):
        comp, members = self.comps[r]
        first = {}
        labels, sizes = [], []
        for i, c in enumerate(centers):
            cid = comp[c]
            if cid not in first:
                first[cid] = i
                labels.append(i)
                sizes.append(len(members[cid]))
            else:
                labels.append(first[cid])
                sizes.append(0)
        return labels, sizes

    def greedy(self, k):
        seeds, gains = [], []
        for _ in range(k):
            best = None
            for v in range(self.g.n):
                if v in seeds:
                    continue
                s = self.gain(v, set(seeds))
                if best is None or s > best[0]:
                    best = (s, v)
            seeds.append(best[1])
            gains.append(best[0])
        return seeds, gains

    def spread(self, seeds):
        seeds = set(seeds)
        total = 0
        for comp, members in self.comps:
            hit = {comp[s] for s in seeds}
            total += sum(len(members[c]) for c in hit)
        return total
