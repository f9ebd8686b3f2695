"""Prefix trie over label strings expanded from workload queries.

Every node is identified by the label path from the root. Nodes carry the
set of query hashes whose expansions pass through them, plus a probability
label: the workload-weighted chance that a traversal spells that label
prefix. Probabilities are derived per query by splitting the query's
remaining mass uniformly among its tagged children at each step, then mixed
across queries by relative frequency.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MissingFrequency, ZeroProbabilityPrefix
from .rpq import LabelString, QueryExpr

PROB_TOL = 1e-12


class _Node:
    __slots__ = ("label", "children", "tags", "prob")

    def __init__(self, label: str | None):
        self.label = label
        self.children: dict[str, _Node] = {}
        self.tags: set[str] = set()
        self.prob = 0.0


@dataclass(frozen=True)
class TrieSnapshot:
    """Frozen (path -> probability) view taken at a swapping iteration."""

    probs: dict[LabelString, float]


class PatternTrie:
    """Label-sequence prefix trie with per-node query tags and probabilities."""

    def __init__(self):
        self.root = _Node(None)
        self.root.prob = 1.0
        self._substrings: frozenset[LabelString] | None = None

    # ------------------------------------------------------------ structure

    def insert_query(self, q: QueryExpr | str, strings: set[LabelString]) -> None:
        """Tag every prefix node of every string with the query's hash.

        Creates missing nodes; already-present nodes gain the tag even when
        created by a different query. Idempotent. Probabilities are not
        recomputed here.
        """
        tag = q if isinstance(q, str) else q.hash
        for s in sorted(strings):
            node = self.root
            for label in s:
                node = node.children.setdefault(label, _Node(label))
                node.tags.add(tag)
        self._substrings = None

    def remove_query(self, q_hash: str) -> None:
        """Strip the tag everywhere and prune subtrees left untagged."""
        def strip(node: _Node) -> None:
            for label in list(node.children):
                child = node.children[label]
                child.tags.discard(q_hash)
                if not child.tags:
                    del node.children[label]
                else:
                    strip(child)

        strip(self.root)
        self._substrings = None

    def query_tags(self) -> set[str]:
        """Hashes of every query currently tagged somewhere in the trie."""
        tags: set[str] = set()

        def walk(node: _Node) -> None:
            for child in node.children.values():
                tags.update(child.tags)
                walk(child)

        walk(self.root)
        return tags

    def max_depth(self) -> int:
        def depth(node: _Node) -> int:
            if not node.children:
                return 0
            return 1 + max(depth(c) for c in node.children.values())

        return depth(self.root)

    # -------------------------------------------------------- probabilities

    def recompute_probabilities(self, freqs: dict[str, float]) -> None:
        """Refresh every node's probability label from query frequencies.

        Per query, mass starts at 1 at the root and splits 1/m among the m
        children tagged with that query; a node with no tagged children ends
        the query's pattern there and keeps the residual as implicit stop
        mass. Node probability is the frequency-weighted sum over queries.
        Raises MissingFrequency if a tagged query has no frequency entry.
        """
        tags = self.query_tags()
        missing = tags - freqs.keys()
        if missing:
            raise MissingFrequency(f"no frequency for queries {sorted(missing)}")

        def reset(node: _Node) -> None:
            for child in node.children.values():
                child.prob = 0.0
                reset(child)

        reset(self.root)
        self.root.prob = 1.0

        for tag in sorted(tags):
            freq = freqs[tag]
            if freq <= 0.0:
                continue
            stack: list[tuple[_Node, float]] = [(self.root, 1.0)]
            while stack:
                node, conditional = stack.pop()
                tagged = [node.children[lab] for lab in sorted(node.children)
                          if tag in node.children[lab].tags]
                if not tagged:
                    continue
                share = conditional / len(tagged)
                for child in tagged:
                    child.prob += freq * share
                    stack.append((child, share))

    def node_at(self, prefix: LabelString) -> _Node | None:
        node = self.root
        for label in prefix:
            node = node.children.get(label)
            if node is None:
                return None
        return node

    def prob_at(self, prefix: LabelString) -> float:
        node = self.node_at(prefix)
        return node.prob if node is not None else 0.0

    def next_label_probs(self, prefix: LabelString) -> dict[str, float]:
        """Conditional next-label distribution after `prefix`.

        Values sum to at most 1; the shortfall is the probability that the
        traversal stops at the prefix. Empty map when the prefix is absent.
        Raises ZeroProbabilityPrefix when the prefix node exists but carries
        zero probability (stale trie; recompute first).
        """
        node = self.node_at(prefix)
        if node is None:
            return {}
        if not node.children:
            return {}
        if node.prob <= 0.0:
            raise ZeroProbabilityPrefix(f"prefix {prefix!r} has zero probability")
        return {label: node.children[label].prob / node.prob
                for label in sorted(node.children)}

    # ----------------------------------------------------------- snapshots

    def walk(self):
        """Yield (path, node) depth-first, children in label order, root first."""
        def go(path: LabelString, node: _Node):
            yield path, node
            for label in sorted(node.children):
                yield from go(path + (label,), node.children[label])

        yield from go((), self.root)

    def snapshot(self) -> TrieSnapshot:
        return TrieSnapshot({path: node.prob for path, node in self.walk()})

    def diff_since(self, snap: TrieSnapshot) -> set[LabelString]:
        """Paths whose probability changed, appeared, or vanished since snap."""
        current = {path: node.prob for path, node in self.walk()}
        changed: set[LabelString] = set()
        for path in current.keys() | snap.probs.keys():
            a = current.get(path)
            b = snap.probs.get(path)
            if a is None or b is None or abs(a - b) > PROB_TOL:
                changed.add(path)
        return changed

    # -------------------------------------------------------------- helpers

    def prefix_substrings(self) -> frozenset[LabelString]:
        """Every contiguous label subsequence of any root-to-node path.

        Used to prune structural path enumeration: a vertex sequence can
        only extend to a trie-legal one if its label string occurs inside
        some trie path. Cached until the structure changes.
        """
        if self._substrings is None:
            subs: set[LabelString] = set()
            for path, _node in self.walk():
                for i in range(len(path)):
                    for j in range(i + 1, len(path) + 1):
                        subs.add(path[i:j])
            self._substrings = frozenset(subs)
        return self._substrings

    def dump(self) -> str:
        """One line per node: path, probability, comma-joined sorted tags."""
        lines = []
        for path, node in self.walk():
            lines.append(f"{''.join(path)}\t{node.prob:.10g}\t{','.join(sorted(node.tags))}")
        return "\n".join(lines) + "\n"


def insert_query(trie: PatternTrie, q: QueryExpr | str, strings: set[LabelString]) -> PatternTrie:
    trie.insert_query(q, strings)
    return trie


def remove_query(trie: PatternTrie, q_hash: str) -> PatternTrie:
    trie.remove_query(q_hash)
    return trie


def recompute_probabilities(trie: PatternTrie, freqs: dict[str, float]) -> PatternTrie:
    trie.recompute_probabilities(freqs)
    return trie
