import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from icsketch.graph import (
    CapacityError,
    Constant,
    DegreeWeighted,
    Graph,
    GraphFormatError,
    UniformRange,
    edge_probability,
    erdos_renyi_m,
    load_edge_list,
    parse_model,
    read_csr,
    read_edge_list,
    read_graph,
    write_csr,
    write_edge_list,
)


def naive_csr(lines):
    """Set-of-pairs builder: the obvious way to do what load_edge_list does."""
    pairs = set()
    ids = set()
    for line in lines:
        a, b = map(int, line.split()[:2])
        ids.update((a, b))
        if a != b:
            pairs.add((a, b))
            pairs.add((b, a))
    order = sorted(ids)
    rank = {x: i for i, x in enumerate(order)}
    adj = [[] for _ in order]
    for a, b in pairs:
        adj[rank[a]].append(rank[b])
    offsets = [0]
    nbrs = []
    for lst in adj:
        nbrs.extend(sorted(lst))
        offsets.append(len(nbrs))
    return np.array(offsets), np.array(nbrs)


def test_path_graph():
    g = load_edge_list("0 1\n1 2")
    assert (g.n, g.m) == (3, 2)
    assert g.neighbors_of(1).tolist() == [0, 2]


def test_dedupe_and_self_loop():
    g = load_edge_list("0 1\n1 0\n0 0")
    assert (g.n, g.m) == (2, 1)
    assert g.neighbors_of(0).tolist() == [1]


def test_comments_and_extra_columns():
    g = load_edge_list("# header\n% other\n\n5 7 0.3\n7 9 x y\n")
    assert (g.n, g.m) == (3, 2)
    assert g.neighbors_of(1).tolist() == [0, 2]


def test_directed_input_symmetrized():
    g = load_edge_list("0 1\n2 1\n", directed=True)
    assert g.has_edge(1, 0) and g.has_edge(1, 2)


def test_compaction_keeps_numeric_order():
    g = load_edge_list("100 7\n7 3000000000\n")
    # 7 -> 0, 100 -> 1, 3e9 -> 2
    assert g.neighbors_of(0).tolist() == [1, 2]


def test_random_file_matches_naive_builder():
    rng = np.random.default_rng(11)
    lines = [f"{a} {b}" for a, b in rng.integers(0, 300, size=(1000, 2)) * 3]
    g = load_edge_list("\n".join(lines))
    off, nb = naive_csr(lines)
    assert np.array_equal(g.offsets, off)
    assert np.array_equal(g.neighbors, nb)


@pytest.mark.parametrize(
    "text,line",
    [("0 1\n2\n", 2), ("0 1\n# c\na b\n", 3), ("1 -2\n", 1), ("0 1.5\n", 1)],
)
def test_malformed_lines_report_line_number(text, line):
    with pytest.raises(GraphFormatError) as exc:
        load_edge_list(text)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_id_capacity():
    load_edge_list(f"0 {2**32 - 1}\n")
    with pytest.raises(CapacityError):
        load_edge_list(f"0 {2**32}\n")


def test_empty_input():
    g = load_edge_list("# nothing\n")
    assert (g.n, g.m) == (0, 0)
    g.validate()


def test_graph_arrays_read_only():
    g = load_edge_list("0 1")
    with pytest.raises(ValueError):
        g.neighbors[0] = 5


@st.composite
def edge_lists(draw):
    n = draw(st.integers(1, 30))
    es = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=80))
    return n, es


@settings(max_examples=60, deadline=None)
@given(edge_lists())
def test_csr_invariants(data):
    n, es = data
    us = [a for a, _ in es]
    vs = [b for _, b in es]
    g = Graph.from_edges(n, us, vs)
    g.validate()
    assert g.offsets[0] == 0 and g.offsets[-1] == 2 * g.m
    assert g.degrees().sum() == 2 * g.m
    simple = {(min(a, b), max(a, b)) for a, b in es if a != b}
    assert g.m == len(simple)
    for u in range(n):
        nb = g.neighbors_of(u).tolist()
        assert nb == sorted(set(nb)) and u not in nb
        for v in nb:
            assert u in g.neighbors_of(v).tolist()


@settings(max_examples=25, deadline=None)
@given(edge_lists())
def test_round_trips(tmp_path_factory, data):
    n, es = data
    g = Graph.from_edges(n, [a for a, _ in es], [b for _, b in es])
    d = tmp_path_factory.mktemp("rt")
    write_csr(g, d / "g.csr")
    h = read_csr(d / "g.csr")
    assert h.offsets.tobytes() == g.offsets.tobytes()
    assert h.neighbors.tobytes() == g.neighbors.tobytes()
    if g.n and np.all(g.degrees() > 0):
        write_edge_list(g, d / "g.txt")
        e = read_edge_list(d / "g.txt")
        assert np.array_equal(e.offsets, g.offsets) and np.array_equal(e.neighbors, g.neighbors)


def test_csr_layout_is_little_endian(tmp_path):
    g = load_edge_list("0 1\n1 2")
    write_csr(g, tmp_path / "g.csr")
    raw = (tmp_path / "g.csr").read_bytes()
    assert raw[:16] == (3).to_bytes(8, "little") + (2).to_bytes(8, "little")
    assert len(raw) == 16 + 8 * 4 + 4 * 4
    assert read_graph(tmp_path / "g.csr", "csr").m == 2


def test_truncated_csr(tmp_path):
    g = load_edge_list("0 1\n1 2")
    write_csr(g, tmp_path / "g.csr")
    (tmp_path / "t.csr").write_bytes((tmp_path / "g.csr").read_bytes()[:-3])
    with pytest.raises(GraphFormatError):
        read_csr(tmp_path / "t.csr")


def test_constant_probability():
    g = load_edge_list("0 1\n1 2")
    assert edge_probability(g, Constant(0.2), 0, 1) == 0.2


def test_degree_weighted_on_path():
    g = load_edge_list("0 1\n1 2")
    assert edge_probability(g, DegreeWeighted(), 0, 1) == pytest.approx(2 / 3)
    assert edge_probability(g, DegreeWeighted(), 1, 0) == pytest.approx(2 / 3)


def test_edge_probability_asserts_membership():
    g = load_edge_list("0 1\n1 2")
    with pytest.raises(AssertionError):
        edge_probability(g, Constant(0.5), 0, 2)


def test_uniform_mean_on_large_graph():
    g = erdos_renyi_m(50_000, 101_000, seed=3)
    assert g.m >= 100_000
    u, v = g.edges()
    p = UniformRange(0.0, 0.1).probabilities(g, u, v)
    assert p.min() >= 0.0 and p.max() < 0.1
    assert 0.049 <= p.mean() <= 0.051


@pytest.mark.parametrize("model", [Constant(0.3), UniformRange(0.01, 0.4), DegreeWeighted()])
def test_probability_symmetry(model):
    g = erdos_renyi_m(200, 600, seed=5)
    u, v = g.edges()
    assert np.array_equal(model.probabilities(g, u, v), model.probabilities(g, v, u))
    for a, b in list(zip(u.tolist(), v.tolist()))[:50]:
        assert model.probability(g, a, b) == model.probability(g, b, a)


def test_vectorized_matches_scalar():
    g = erdos_renyi_m(100, 300, seed=2)
    u, v = g.edges()
    for model in (Constant(0.3), UniformRange(0.2, 0.9), DegreeWeighted()):
        vec = model.probabilities(g, u, v)
        assert vec.tolist() == [model.probability(g, a, b) for a, b in zip(u.tolist(), v.tolist())]


@pytest.mark.parametrize("bad", [lambda: Constant(1.5), lambda: Constant(-0.1), lambda: UniformRange(0.5, 0.2)])
def test_model_validation(bad):
    with pytest.raises(ValueError):
        bad()


def test_parse_model():
    assert parse_model("0.02") == Constant(0.02)
    assert parse_model("const:0.5") == Constant(0.5)
    assert parse_model("uniform:0:0.1") == UniformRange(0.0, 0.1)
    assert isinstance(parse_model("WIC"), DegreeWeighted)
