import pytest
from hypothesis import given, settings, strategies as st

from rpqpart import Partitioning, build_graph, hash_partition, imbalance, is_boundary
from rpqpart.errors import DuplicateVertexId, SelfLoop, UnknownEndpoint, UnknownVertex


def test_fixture_adjacency(fig_graph):
    assert fig_graph.neighbors(2) == (1, 3, 4, 5)
    assert fig_graph.neighbors(3) == (2, 4, 5, 6)
    assert fig_graph.label(1) == "a"
    assert fig_graph.label(5) == "c"
    assert fig_graph.with_label("c") == (3, 5)


def test_single_vertex_no_edges():
    g = build_graph([(0, "a")], [])
    assert g.neighbors(0) == ()


def test_duplicate_edges_collapse():
    g = build_graph([(0, "a"), (1, "b")], [(0, 1), (1, 0), (0, 1)])
    assert g.neighbors(0) == (1,)
    assert g.edge_count() == 1


def test_build_errors():
    with pytest.raises(DuplicateVertexId):
        build_graph([(0, "a"), (0, "b")], [])
    with pytest.raises(UnknownEndpoint):
        build_graph([(0, "a")], [(0, 1)])
    with pytest.raises(SelfLoop):
        build_graph([(0, "a")], [(0, 0)])


def test_is_boundary(fig_graph, part_ab):
    assert is_boundary(fig_graph, part_ab, 3) is True
    assert is_boundary(fig_graph, part_ab, 1) is False
    single = Partitioning({v: 0 for v in fig_graph.vertices}, 1)
    assert all(not is_boundary(fig_graph, single, v) for v in fig_graph.vertices)
    with pytest.raises(UnknownVertex):
        is_boundary(fig_graph, part_ab, 99)


def test_imbalance_values():
    p = Partitioning({v: v % 8 for v in range(64)}, 8)
    assert imbalance(p) == pytest.approx(0.0)
    p = Partitioning({v: v % 2 for v in range(6)}, 2)
    assert imbalance(p) == pytest.approx(0.0)
    p = Partitioning({0: 0, 1: 0, 2: 0, 3: 0, 4: 1, 5: 1}, 2)
    assert imbalance(p) == pytest.approx(4 / 3 - 1)


def test_partitioning_move_bookkeeping():
    p = Partitioning({0: 0, 1: 0, 2: 1}, 2)
    p.move(0, 1)
    assert p.of(0) == 1
    assert p.sizes == (1, 2)
    assert p.members(1) == {0, 2}


def test_hash_partition_deterministic(fig_graph):
    a = hash_partition(fig_graph, 3, seed=7)
    b = hash_partition(fig_graph, 3, seed=7)
    assert a.assignment == b.assignment
    c = hash_partition(fig_graph, 3, seed=8)
    assert any(a.of(v) != c.of(v) for v in fig_graph.vertices)


def test_hash_partition_k1(fig_graph):
    p = hash_partition(fig_graph, 1, seed=0)
    assert set(p.assignment.values()) == {0}


def test_hash_partition_well_mixed():
    g = build_graph([(v, "a") for v in range(10_000)], [])
    p = hash_partition(g, 8, seed=0)
    assert imbalance(p) < 0.10


@given(st.integers(2, 40), st.integers(1, 6), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_partition_disjoint_cover(n, k, seed):
    g = build_graph([(v, "ab"[v % 2]) for v in range(n)], [])
    k = min(k, n)
    p = hash_partition(g, k, seed)
    seen = {}
    for pid in range(k):
        for v in p.members(pid):
            assert v not in seen
            seen[v] = pid
    assert set(seen) == set(g.vertices)
    assert sum(p.sizes) == n


@given(st.lists(st.tuples(st.integers(0, 19), st.integers(0, 19)), max_size=60))
@settings(max_examples=60, deadline=None)
def test_adjacency_symmetry(pairs):
    records = [(v, "x") for v in range(20)]
    edges = [(u, v) for u, v in pairs if u != v]
    g = build_graph(records, edges)
    for v in g.vertices:
        for n in g.neighbors(v):
            assert v in g.neighbors(n)
            assert n != v
