"""Deterministic hash-based edge sampling.

Every sampled graph is a pure function of the sketch id ``r``: an undirected
edge ``(u, v)`` belongs to sampled graph ``r`` iff

    mix64(mix64(r) XOR mix64(edge_key(u, v)))  <  floor(p_uv * 2**64)

with ``p_uv >= 1`` meaning "always" and the floor taken toward zero. Nothing
about a sampled graph is ever stored.

The outer ``mix64`` matters. Without it, whether an edge is kept depends only
on the top bits of ``mix64(r) XOR mix64(key)``, so two sketch ids whose
hashes share leading bits give almost the same sampled graph. Edges within
one id are also coupled in the same way, which biases the spread estimate no
matter how many sketches are used.

``mix64`` is the splitmix64 step: add the golden-ratio increment, then the
two-multiply avalanche finalizer. The constants below are part of the
contract; the compiled kernel uses the same ones bit-for-bit.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
MIX_GAMMA = 0x9E3779B97F4A7C15
MIX_MUL1 = 0xBF58476D1CE4E5B9
MIX_MUL2 = 0x94D049BB133111EB
TWO_64 = float(1 << 64)
INV_TWO_64 = 2.0**-64
#: threshold value that no 64-bit hash can reach
ALWAYS = 1 << 64


def mix64(x: int) -> int:
    """splitmix64 of a 64-bit integer."""
    z = (x + MIX_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * MIX_MUL1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_MUL2) & MASK64
    return z ^ (z >> 31)


def mix64_array(x) -> np.ndarray:
    """Vectorized :func:`mix64` over a uint64 array (wrapping arithmetic)."""
    z = np.asarray(x, dtype=np.uint64) + np.uint64(MIX_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX_MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX_MUL2)
    return z ^ (z >> np.uint64(31))


def edge_key(u: int, v: int) -> int:
    """Pack an undirected edge into 64 bits: ``min << 32 | max``."""
    if u > v:
        u, v = v, u
    return (u << 32) | v


def edge_key_array(u, v) -> np.ndarray:
    u = np.asarray(u, dtype=np.uint64)
    v = np.asarray(v, dtype=np.uint64)
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    return (lo << np.uint64(32)) | hi


def edge_hash(u: int, v: int, r: int) -> int:
    """The 64-bit value compared against an edge's threshold in sampled graph ``r``."""
    return mix64(mix64(r & MASK64) ^ mix64(edge_key(u, v)))


def threshold(p: float) -> int:
    """Integer cut-off for probability ``p``; hashes below it are sampled.

    Returns :data:`ALWAYS` for ``p >= 1`` so that the comparison is
    unconditionally true.
    """
    if p >= 1.0:
        return ALWAYS
    if p <= 0.0:
        return 0
    return int(p * TWO_64)


def threshold_array(p) -> np.ndarray:
    """Vectorized :func:`threshold` as Python-int-free uint64 plus an always-mask."""
    p = np.asarray(p, dtype=np.float64)
    always = p >= 1.0
    scaled = np.where(always | (p <= 0.0), 0.0, p) * TWO_64
    return scaled.astype(np.uint64), always


def sample(g, model, u: int, v: int, r: int) -> bool:
    """Is edge ``(u, v)`` present in sampled graph ``r``?"""
    return edge_hash(u, v, r) < threshold(model.probability(g, u, v))


def sample_array(g, model, us, vs, r: int) -> np.ndarray:
    """Vectorized :func:`sample` for many edges of one sampled graph."""
    h = mix64_array(mix64_array(edge_key_array(us, vs)) ^ np.uint64(mix64(r & MASK64)))
    thr, always = threshold_array(model.probabilities(g, us, vs))
    return always | (h < thr)
