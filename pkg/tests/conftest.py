import pytest

from rpqpart import PatternTrie, Partitioning, build_graph, expand, parse


@pytest.fixture
def fig_graph():
    """Six-vertex illustrative graph used throughout the worked examples."""
    return build_graph(
        [(1, "a"), (2, "b"), (3, "c"), (4, "d"), (5, "c"), (6, "a")],
        [(1, 2), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (3, 6), (4, 5), (5, 6)],
    )


@pytest.fixture
def q1():
    return parse("a.(b|c).(c|d)")


@pytest.fixture
def q2():
    return parse("(c|a).c.a")


@pytest.fixture
def two_query_trie(q1, q2):
    trie = PatternTrie()
    trie.insert_query(q1, expand(q1, 3))
    trie.insert_query(q2, expand(q2, 3))
    trie.recompute_probabilities({q1.hash: 0.5, q2.hash: 0.5})
    return trie


@pytest.fixture
def part_ab():
    """A = {1,2,4} as partition 0, B = {3,5,6} as partition 1."""
    return Partitioning({1: 0, 2: 0, 4: 0, 3: 1, 5: 1, 6: 1}, 2)


@pytest.fixture
def part_alt():
    """V1 = {1,3,6}, V2 = {2,4,5}."""
    return Partitioning({1: 0, 3: 0, 6: 0, 2: 1, 4: 1, 5: 1}, 2)


@pytest.fixture
def intro_query():
    return parse("c.(b|d)")


@pytest.fixture
def intro_trie(intro_query):
    trie = PatternTrie()
    trie.insert_query(intro_query, expand(intro_query, 3))
    trie.recompute_probabilities({intro_query.hash: 1.0})
    return trie
