import pytest
from hypothesis import given, settings, strategies as st

from rpqpart import PatternTrie, expand, parse
from rpqpart.errors import MissingFrequency, ZeroProbabilityPrefix

HALF = {"freqs": None}


def trie_paths(trie):
    return {path for path, _node in trie.walk() if path}


def node_tags(trie, text):
    node = trie.node_at(tuple(text))
    return node.tags if node is not None else None


def test_insert_first_query(q1):
    trie = PatternTrie()
    trie.insert_query(q1, expand(q1, 3))
    expected = {"a", "ab", "ac", "abc", "abd", "acc", "acd"}
    assert {"".join(p) for p in trie_paths(trie)} == expected
    for text in expected:
        assert node_tags(trie, text) == {q1.hash}


def test_insert_second_query_shares_nodes(q1, q2):
    trie = PatternTrie()
    trie.insert_query(q1, expand(q1, 3))
    trie.insert_query(q2, expand(q2, 3))
    assert node_tags(trie, "ac") == {q1.hash, q2.hash}
    assert node_tags(trie, "a") == {q1.hash, q2.hash}
    assert node_tags(trie, "c") == {q2.hash}
    assert {"".join(p) for p in trie_paths(trie)} == {
        "a", "ab", "ac", "abc", "abd", "acc", "acd", "aca", "c", "cc", "cca"}


def test_insert_idempotent(q1):
    trie = PatternTrie()
    trie.insert_query(q1, expand(q1, 3))
    before = {p: (set(n.tags)) for p, n in trie.walk()}
    trie.insert_query(q1, expand(q1, 3))
    after = {p: (set(n.tags)) for p, n in trie.walk()}
    assert before == after


def test_remove_restores_prior_trie(q1, q2):
    trie = PatternTrie()
    trie.insert_query(q1, expand(q1, 3))
    reference = {p: set(n.tags) for p, n in trie.walk()}
    trie.insert_query(q2, expand(q2, 3))
    trie.remove_query(q2.hash)
    assert {p: set(n.tags) for p, n in trie.walk()} == reference


def test_remove_unknown_is_noop(q1):
    trie = PatternTrie()
    trie.insert_query(q1, expand(q1, 3))
    before = {p for p, _ in trie.walk()}
    trie.remove_query("feedfacedeadbeef")
    assert {p for p, _ in trie.walk()} == before


def test_remove_all_leaves_bare_root(q1, q2):
    trie = PatternTrie()
    trie.insert_query(q1, expand(q1, 3))
    trie.insert_query(q2, expand(q2, 3))
    trie.remove_query(q1.hash)
    trie.remove_query(q2.hash)
    assert list(trie.walk()) == [((), trie.root)]


def test_probability_goldens(two_query_trie):
    trie = two_query_trie
    assert trie.prob_at(("a",)) == pytest.approx(0.75, abs=1e-12)
    assert trie.prob_at(("a", "b")) == pytest.approx(0.25, abs=1e-12)
    expected = {
        "abc": 0.125, "c": 0.25, "ac": 0.5, "cc": 0.25, "aca": 0.25,
        "cca": 0.25, "abd": 0.125, "acc": 0.125, "acd": 0.125,
    }
    for text, prob in expected.items():
        assert trie.prob_at(tuple(text)) == pytest.approx(prob, abs=1e-9), text


def test_missing_frequency(q1, q2):
    trie = PatternTrie()
    trie.insert_query(q1, expand(q1, 3))
    trie.insert_query(q2, expand(q2, 3))
    with pytest.raises(MissingFrequency):
        trie.recompute_probabilities({q1.hash: 1.0})


def test_next_label_probs_goldens(two_query_trie):
    trie = two_query_trie
    assert trie.next_label_probs(("a", "b")) == pytest.approx({"c": 0.5, "d": 0.5})
    got = trie.next_label_probs(("a",))
    assert got["b"] == pytest.approx(1 / 3)
    assert got["c"] == pytest.approx(2 / 3)
    assert trie.next_label_probs(("z", "z", "z")) == {}


def test_next_label_probs_zero_prefix(q1, q2, two_query_trie):
    trie = two_query_trie
    trie.recompute_probabilities({q1.hash: 0.0, q2.hash: 1.0})
    with pytest.raises(ZeroProbabilityPrefix):
        trie.next_label_probs(("a", "b"))


def test_root_children_sum_to_one(two_query_trie):
    probs = two_query_trie.next_label_probs(())
    assert sum(probs.values()) == pytest.approx(1.0, abs=1e-9)


def test_children_never_exceed_parent(two_query_trie):
    for path, node in two_query_trie.walk():
        child_sum = sum(c.prob for c in node.children.values())
        assert child_sum <= node.prob + 1e-9, path


def test_diff_since_no_change(two_query_trie):
    snap = two_query_trie.snapshot()
    assert two_query_trie.diff_since(snap) == set()


def test_diff_since_frequency_shift(q1, q2, two_query_trie):
    trie = two_query_trie
    snap = trie.snapshot()
    trie.recompute_probabilities({q1.hash: 1.0, q2.hash: 0.0})
    changed = trie.diff_since(snap)
    assert ("a",) in changed
    assert ("a", "b") in changed  # 0.25 -> 0.5
    assert {"".join(p) for p in changed} >= {"a", "c", "cc", "cca", "aca"}


def test_diff_since_removed_query(q1, q2, two_query_trie):
    trie = two_query_trie
    snap = trie.snapshot()
    trie.remove_query(q2.hash)
    changed = {"".join(p) for p in trie.diff_since(snap)}
    assert {"c", "cc", "cca", "aca"} <= changed


def test_dump_golden(q1, q2, two_query_trie):
    h1, h2 = q1.hash, q2.hash
    both = ",".join(sorted([h1, h2]))
    expected = [
        "\t1\t",
        f"a\t0.75\t{both}",
        f"ab\t0.25\t{h1}",
        f"abc\t0.125\t{h1}",
        f"abd\t0.125\t{h1}",
        f"ac\t0.5\t{both}",
        f"aca\t0.25\t{h2}",
        f"acc\t0.125\t{h1}",
        f"acd\t0.125\t{h1}",
        f"c\t0.25\t{h2}",
        f"cc\t0.25\t{h2}",
        f"cca\t0.25\t{h2}",
    ]
    assert two_query_trie.dump() == "\n".join(expected) + "\n"


def test_max_depth(two_query_trie):
    assert two_query_trie.max_depth() == 3
    assert PatternTrie().max_depth() == 0


@given(st.lists(st.sampled_from(["a", "a.b", "a.b.c", "b.c", "c.(a|b)", "(a|b).(b|c)"]),
                min_size=1, max_size=4, unique=True))
@settings(max_examples=60, deadline=None)
def test_insert_remove_round_trip(texts):
    queries = [parse(t) for t in texts]
    trie = PatternTrie()
    for q in queries[:-1]:
        trie.insert_query(q, expand(q, 3))
    reference = {p: set(n.tags) for p, n in trie.walk()}
    trie.insert_query(queries[-1], expand(queries[-1], 3))
    trie.remove_query(queries[-1].hash)
    assert {p: set(n.tags) for p, n in trie.walk()} == reference


def test_prefix_substrings(two_query_trie):
    subs = two_query_trie.prefix_substrings()
    assert ("b", "c") in subs  # inside "abc"
    assert ("c", "a") in subs  # inside "cca"
    assert ("d",) in subs
    assert ("b", "a") not in subs
