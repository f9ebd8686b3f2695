"""Label-constrained path evaluation with inter-partition traversal counting.

`ipt` counts expansions along edges whose endpoints live in different
partitions. By default every expansion that extends a live prefix counts,
whether or not the prefix later completes a match, mirroring an engine that
traverses before knowing a path completes. Expanded strings are merged into
one label prefix tree so shared prefixes are traversed, and counted, once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ExpansionOverflow  # noqa: F401  (re-raised from expand)
from .graph import LabeledGraph, Partitioning, VertexId
from .rpq import LabelString, QueryExpr, Workload, expand


def match_paths(g: LabeledGraph, label_string: LabelString) -> set[tuple[VertexId, ...]]:
    """Exhaustively enumerate vertex sequences spelling `label_string`.

    Consecutive vertices must be adjacent; sequences may revisit vertices.
    Oracle-grade: intended for small graphs and tests.
    """
    if not label_string:
        return set()
    paths = {(v,) for v in g.with_label(label_string[0])}
    for label in label_string[1:]:
        paths = {p + (n,) for p in paths for n in g.neighbors(p[-1])
                 if g.label(n) == label}
    return paths


class _PrefixTree:
    __slots__ = ("children", "terminal")

    def __init__(self):
        self.children: dict[str, _PrefixTree] = {}
        self.terminal = False


def _merge_strings(strings: set[LabelString]) -> _PrefixTree:
    root = _PrefixTree()
    for s in sorted(strings):
        node = root
        for label in s:
            node = node.children.setdefault(label, _PrefixTree())
        if s:
            node.terminal = True
    return root


def evaluate_with_ipt(g: LabeledGraph, part: Partitioning, q: QueryExpr,
                      star_cap: int, count_partial: bool = True) -> tuple[int, int]:
    """(completed match paths, inter-partition traversals) for one query.

    Counting is per distinct prefix sequence and edge; with
    count_partial=False only crossings that lie on some completed match
    count, each weighted by the number of completions it leads to.
    """
    strings = expand(q, star_cap)
    root = _merge_strings(strings)

    completions: dict[tuple[VertexId, int], int] = {}

    def downstream(v: VertexId, node: _PrefixTree) -> int:
        # number of completed suffix sequences from (v, node)
        key = (v, id(node))
        got = completions.get(key)
        if got is not None:
            return got
        count = 1 if node.terminal else 0
        for label, child in node.children.items():
            for n in g.neighbors(v):
                if g.label(n) == label:
                    count += downstream(n, child)
        completions[key] = count
        return count

    matches = 0
    ipt = 0
    frontier: dict[tuple[VertexId, int], tuple[_PrefixTree, int]] = {}
    for label in sorted(root.children):
        child = root.children[label]
        for v in g.with_label(label):
            frontier[(v, id(child))] = (child, 1)
            if child.terminal:
                matches += 1

    while frontier:
        extended: dict[tuple[VertexId, int], tuple[_PrefixTree, int]] = {}
        for (u, _nid), (node, count) in frontier.items():
            pu = part.of(u)
            for label in sorted(node.children):
                child = node.children[label]
                for n in g.neighbors(u):
                    if g.label(n) != label:
                        continue
                    if part.of(n) != pu:
                        if count_partial:
                            ipt += count
                        else:
                            ipt += count * downstream(n, child)
                    key = (n, id(child))
                    if key in extended:
                        extended[key] = (child, extended[key][1] + count)
                    else:
                        extended[key] = (child, count)
                    if child.terminal:
                        matches += count
        frontier = extended

    return matches, ipt


@dataclass
class QueryStats:
    matches: int
    ipt: int
    frequency: float


@dataclass
class IptReport:
    """Per-query match and crossing counts plus workload-weighted total."""

    per_query: dict[str, QueryStats] = field(default_factory=dict)
    total_ipt: int = 0
    weighted_ipt: float = 0.0

    def to_json(self) -> str:
        payload = {
            "version": 1,
            "total_ipt": self.total_ipt,
            "weighted_ipt": self.weighted_ipt,
            "per_query": {
                h: {"matches": s.matches, "ipt": s.ipt, "frequency": s.frequency}
                for h, s in sorted(self.per_query.items())
            },
        }
        return json.dumps(payload, indent=2) + "\n"

    def to_csv(self) -> str:
        lines = ["query_hash,matches,ipt,frequency"]
        for h in sorted(self.per_query):
            s = self.per_query[h]
            lines.append(f"{h},{s.matches},{s.ipt},{s.frequency:.10g}")
        return "\n".join(lines) + "\n"


def measure_workload(g: LabeledGraph, part: Partitioning, w: Workload,
                     now: int, star_cap: int = 3,
                     count_partial: bool = True) -> IptReport:
    """Evaluate each in-window query once and weight crossings by frequency."""
    report = IptReport()
    freqs = w.frequencies(now)
    for qh in sorted(freqs):
        matches, ipt = evaluate_with_ipt(g, part, w.expr(qh), star_cap, count_partial)
        report.per_query[qh] = QueryStats(matches, ipt, freqs[qh])
        report.total_ipt += ipt
        report.weighted_ipt += freqs[qh] * ipt
    return report
