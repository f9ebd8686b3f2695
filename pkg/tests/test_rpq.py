import pytest
from hypothesis import given, settings, strategies as st

from rpqpart import Alt, Atom, Concat, Star, Union, Workload, expand, parse, render
from rpqpart.errors import ExpansionOverflow, NonMonotoneTimestamp, RpqSyntaxError
from rpqpart.rpq import record_query, frequencies


def strings(e, cap=3):
    return sorted("".join(s) for s in expand(e, cap))


def test_parse_worked_examples():
    assert parse("a.(b|c).(c|d)") == Concat(
        Concat(Atom("a"), Alt(Atom("b"), Atom("c"))), Alt(Atom("c"), Atom("d")))
    assert parse("a") == Atom("a")
    assert parse("c.(b|d)") == Concat(Atom("c"), Alt(Atom("b"), Atom("d")))


def test_parse_precedence():
    assert parse("a.b|c") == Alt(Concat(Atom("a"), Atom("b")), Atom("c"))
    assert parse("a+b|c") == Alt(Union(Atom("a"), Atom("b")), Atom("c"))
    assert parse("a.b*") == Concat(Atom("a"), Star(Atom("b")))
    assert parse("(a.b)*") == Star(Concat(Atom("a"), Atom("b")))
    assert parse("Entity.Activity") == Concat(Atom("Entity"), Atom("Activity"))


def test_parse_errors_carry_offset():
    with pytest.raises(RpqSyntaxError) as err:
        parse("a.(b|c")
    assert err.value.offset == 6
    with pytest.raises(RpqSyntaxError):
        parse("")
    with pytest.raises(RpqSyntaxError) as err:
        parse("a..b")
    assert err.value.offset == 2
    with pytest.raises(RpqSyntaxError) as err:
        parse("a b")
    assert err.value.offset == 2


def test_expand_worked_examples(q1, q2):
    assert strings(q1) == ["abc", "abd", "acc", "acd"]
    assert strings(q2) == ["aca", "cca"]


def test_expand_star_cap():
    got = expand(Star(Atom("a")), 2)
    assert got == {(), ("a",), ("a", "a")}


def test_expand_star_in_concat():
    got = strings(parse("a.b*.c"), cap=2)
    assert got == ["abbc", "abc", "ac"]


def test_expand_union_same_as_alt():
    assert strings(parse("a+b")) == strings(parse("a|b"))


def test_expand_overflow():
    wide = "|".join("abcd")
    e = parse(".".join(f"({wide})" for _ in range(6)))
    with pytest.raises(ExpansionOverflow):
        expand(e, 3, max_strings=1000)


def test_query_hash_stable_and_distinct(q1, q2):
    assert q1.hash == parse("a.(b|c).(c|d)").hash
    assert q1.hash != q2.hash
    assert parse("a+b").hash != parse("a|b").hash


_atoms = st.sampled_from(list("abcd"))


def _exprs():
    return st.recursive(
        _atoms.map(Atom),
        lambda inner: st.one_of(
            st.tuples(inner, inner).map(lambda p: Concat(*p)),
            st.tuples(inner, inner).map(lambda p: Alt(*p)),
            st.tuples(inner, inner).map(lambda p: Union(*p)),
            inner.map(Star),
        ),
        max_leaves=8,
    )


@given(_exprs())
@settings(max_examples=200, deadline=None)
def test_render_parse_round_trip(e):
    assert parse(render(e)) == e


@given(_exprs(), _exprs())
@settings(max_examples=100, deadline=None)
def test_expand_distributes_over_alt(e1, e2):
    assert expand(Alt(e1, e2), 2) == expand(e1, 2) | expand(e2, 2)
    assert expand(Union(e1, e2), 2) == expand(e1, 2) | expand(e2, 2)


def test_workload_single_query():
    w = Workload(window_length=10)
    q = parse("a.b")
    record_query(w, q, 0)
    assert frequencies(w, 0) == {q.hash: 1.0}


def test_workload_two_queries_split(q1, q2):
    w = Workload(window_length=10)
    w.record(q1, 0)
    w.record(q2, 1)
    freqs = w.frequencies(1)
    assert freqs[q1.hash] == pytest.approx(0.5)
    assert freqs[q2.hash] == pytest.approx(0.5)


def test_workload_expiry():
    w = Workload(window_length=10)
    q = parse("a")
    w.record(q, 0)
    assert w.frequencies(11) == {}
    assert w.frequencies(9) != {}


def test_workload_relative_frequencies():
    w = Workload(window_length=100)
    qa, qb, qc = parse("a"), parse("b"), parse("c")
    for q, n in [(qa, 1), (qb, 2), (qc, 7)]:
        for _ in range(n):
            w.record(q, 1)
    freqs = w.frequencies(1)
    assert freqs[qa.hash] == pytest.approx(0.1)
    assert freqs[qb.hash] == pytest.approx(0.2)
    assert freqs[qc.hash] == pytest.approx(0.7)


def test_workload_monotone_clock():
    w = Workload(window_length=10)
    w.record(parse("a"), 5)
    with pytest.raises(NonMonotoneTimestamp):
        w.record(parse("b"), 4)


@given(st.lists(st.tuples(st.sampled_from("abc"), st.integers(0, 50)), min_size=1, max_size=40))
@settings(max_examples=100, deadline=None)
def test_frequencies_sum_to_one(events):
    w = Workload(window_length=20)
    for label, t in sorted(events, key=lambda e: e[1]):
        w.record(parse(label), t)
    now = max(t for _, t in events)
    freqs = w.frequencies(now)
    if freqs:
        assert sum(freqs.values()) == pytest.approx(1.0, abs=1e-12)


def test_expired_query_treated_as_new():
    w = Workload(window_length=5)
    q = parse("a.b")
    w.record(q, 0)
    assert w.frequencies(10) == {}
    w.record(q, 11)
    assert w.frequencies(11) == {q.hash: 1.0}


def test_sampled_mode_approximates_exact():
    exact = Workload(window_length=10_000)
    approx = Workload(window_length=10_000, mode="sampled", sample_rate=0.2, seed=3)
    qa, qb = parse("a"), parse("b")
    for t in range(5000):
        q = qa if t % 4 else qb
        exact.record(q, t)
        approx.record(q, t)
    fe = exact.frequencies(5000)
    fa = approx.frequencies(5000)
    assert fa[qa.hash] == pytest.approx(fe[qa.hash], abs=0.05)
