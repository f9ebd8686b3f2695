"""Per-partition transition rows over trie-legal traversal paths.

A row maps a traversal path (vertex sequence of length < t ending at a
subject vertex) to a next-vertex probability distribution: each legal next
label's conditional mass splits uniformly over the subject's neighbors with
that label, and mass with no matching neighbor, plus the stop shortfall,
sits on the subject itself. Rows sum to 1.

Per partition, paths are enumerated inside the partition only. The start
prior of a path is the first label's trie probability split uniformly over
the partition's vertices with that label; this convention reproduces the
per-partition arithmetic the scoring is calibrated against. A vertex's
intra mass accumulates path probability times the in-partition share of
each row (the self entry counts as staying); introversion is intra/total
and extroversion its complement. Vertices with no external neighbors, no
reachable path mass, or introversion above the safe threshold are SAFE and
keep no rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import (
    DisconnectedPath,
    MissingPrefixRow,
    NotATriePrefix,
    VertexIsSafe,
    VertexUnscored,
    ZeroTotalMass,
)
from .graph import LabeledGraph, PartitionId, Partitioning, VertexId
from .rpq import LabelString
from .trie import PatternTrie

ROW_TOL = 1e-9

VertexPath = tuple[VertexId, ...]
Row = dict[VertexId, float]


class VertexStatus(Enum):
    SAFE = "SAFE"
    SCORED = "SCORED"
    UNSCORED = "UNSCORED"


@dataclass(frozen=True)
class MatrixParams:
    """Scoring knobs: max pattern length t, safe threshold, length cutoff."""

    t: int
    safe_threshold: float = 0.85
    length_cutoff: int | None = None

    def max_path_len(self) -> int:
        cutoff = self.length_cutoff if self.length_cutoff is not None else self.t
        return min(cutoff, self.t - 1)


def _row_for(g: LabeledGraph, trie: PatternTrie, subject: VertexId,
             prefix: LabelString) -> Row:
    """Next-vertex distribution for a path ending at `subject` spelling `prefix`."""
    row: Row = {}
    stay = 1.0
    for label, q in trie.next_label_probs(prefix).items():
        if q <= 0.0:
            continue
        matches = [n for n in g.neighbors(subject) if g.label(n) == label]
        if matches:
            share = q / len(matches)
            for n in matches:
                row[n] = row.get(n, 0.0) + share
            stay -= q
    if stay > ROW_TOL:
        row[subject] = row.get(subject, 0.0) + stay
    return row


class RowCache:
    """Rows keyed by (subject, label prefix); they depend only on graph and trie.

    Invalidate with the trie's diff against the snapshot of the previous
    swapping iteration: a row is stale when its prefix's probability, or any
    of its children's, changed.
    """

    def __init__(self):
        self._rows: dict[tuple[VertexId, LabelString], Row] = {}
        self.hits = 0
        self.misses = 0

    def get(self, g: LabeledGraph, trie: PatternTrie, subject: VertexId,
            prefix: LabelString) -> Row:
        key = (subject, prefix)
        row = self._rows.get(key)
        if row is None:
            self.misses += 1
            row = _row_for(g, trie, subject, prefix)
            self._rows[key] = row
        else:
            self.hits += 1
        return row

    def invalidate(self, changed_paths: set[LabelString]) -> None:
        stale = set(changed_paths)
        stale |= {path[:-1] for path in changed_paths if path}
        if not stale:
            return
        for key in [k for k in self._rows if k[1] in stale]:
            del self._rows[key]

    def __len__(self) -> int:
        return len(self._rows)


def transition_row(g: LabeledGraph, trie: PatternTrie, path: VertexPath) -> Row:
    """Validated public form of the row computation.

    Raises NotATriePrefix when the path's label string is not in the trie
    and DisconnectedPath when consecutive vertices are not adjacent.
    """
    for a, b in zip(path, path[1:]):
        if b not in g.neighbors(a):
            raise DisconnectedPath(f"{a} and {b} are not adjacent")
    prefix = tuple(g.label(v) for v in path)
    if trie.node_at(prefix) is None:
        raise NotATriePrefix(f"label string {prefix!r} not in trie")
    return _row_for(g, trie, path[-1], prefix)


def path_probability(priors: dict[VertexId, float],
                     rows: dict[VertexPath, Row],
                     path: VertexPath) -> float:
    """Chain-rule probability of a path: prior of its head times each
    transition taken, read from the rows of its proper prefixes."""
    prob = priors.get(path[0], 0.0)
    for j in range(1, len(path)):
        prefix = path[:j]
        if prefix not in rows:
            raise MissingPrefixRow(f"no row for prefix {prefix!r}")
        prob *= rows[prefix].get(path[j], 0.0)
    return prob


@dataclass
class VertexScore:
    intra: float
    total: float
    status: VertexStatus


class TransitionMatrix:
    """Rows and vertex scores for one partition."""

    def __init__(self, pid: PartitionId, params: MatrixParams):
        self.pid = pid
        self.params = params
        self.rows: dict[VertexPath, Row] = {}
        self.per_vertex: dict[VertexId, VertexScore] = {}
        self.priors: dict[VertexId, float] = {}
        # per scored vertex: path probability total already in per_vertex;
        # out_mass aggregates sum(Pr(p) * row[target]) over its rows
        self.out_mass: dict[VertexId, dict[VertexId, float]] = {}
        self.rows_by_subject: dict[VertexId, list[tuple[VertexPath, Row, float]]] = {}

    def status(self, v: VertexId) -> VertexStatus:
        score = self.per_vertex.get(v)
        return score.status if score is not None else VertexStatus.UNSCORED

    def _scored(self, v: VertexId) -> VertexScore:
        score = self.per_vertex.get(v)
        if score is None:
            raise VertexUnscored(f"vertex {v} not scored in partition {self.pid}")
        if score.status is VertexStatus.SAFE:
            raise VertexIsSafe(f"vertex {v} is safe")
        if score.total <= 0.0:
            raise ZeroTotalMass(f"no query path reaches vertex {v}")
        return score

    def introversion(self, v: VertexId) -> float:
        score = self._scored(v)
        return score.intra / score.total

    def extroversion(self, v: VertexId) -> float:
        return 1.0 - self.introversion(v)

    def scored_vertices(self) -> list[VertexId]:
        return sorted(v for v, s in self.per_vertex.items()
                      if s.status is VertexStatus.SCORED)

    def dump(self) -> str:
        """One line per row: comma-joined path, then vertex:prob pairs."""
        lines = []
        for path in sorted(self.rows, key=lambda p: (len(p), p)):
            row = self.rows[path]
            cells = ",".join(f"{v}:{row[v]:.10g}" for v in sorted(row))
            lines.append(f"{','.join(map(str, path))}\t{cells}")
        return "\n".join(lines) + "\n"


def build_matrix(g: LabeledGraph, part: Partitioning, pid: PartitionId,
                 trie: PatternTrie, params: MatrixParams,
                 cache: RowCache | None = None) -> TransitionMatrix:
    """Sweep one partition's trie-legal paths and score every member vertex.

    Breadth-first in ascending path length; paths never leave the partition.
    The safe test compares introversion accumulated over paths up to the
    length cutoff against the threshold once the sweep completes, so safety
    always reflects every path the configuration admits.
    """
    cache = cache if cache is not None else RowCache()
    m = TransitionMatrix(pid, params)
    members = part.members(pid)

    label_count: dict[str, int] = {}
    for v in members:
        lab = g.label(v)
        label_count[lab] = label_count.get(lab, 0) + 1

    intra_acc: dict[VertexId, float] = {}
    total_acc: dict[VertexId, float] = {}
    rows_by_subject: dict[VertexId, list[tuple[VertexPath, Row, float]]] = {}
    out_acc: dict[VertexId, dict[VertexId, float]] = {}

    for v in sorted(members):
        lab = g.label(v)
        prior = trie.prob_at((lab,))
        if prior > 0.0:
            m.priors[v] = prior / label_count[lab]

    max_len = m.params.max_path_len()
    frontier: list[tuple[VertexPath, LabelString, float]] = [
        ((v,), (g.label(v),), p) for v, p in sorted(m.priors.items())
    ]
    depth = 1
    while frontier and depth <= max_len:
        extended: list[tuple[VertexPath, LabelString, float]] = []
        for path, prefix, prob in frontier:
            subject = path[-1]
            row = cache.get(g, trie, subject, prefix)
            intra = sum(q for tgt, q in row.items() if tgt in members)
            intra_acc[subject] = intra_acc.get(subject, 0.0) + prob * intra
            total_acc[subject] = total_acc.get(subject, 0.0) + prob
            rows_by_subject.setdefault(subject, []).append((path, row, prob))
            out = out_acc.setdefault(subject, {})
            for tgt, q in row.items():
                out[tgt] = out.get(tgt, 0.0) + prob * q
            if depth < max_len:
                for tgt in sorted(row):
                    if tgt == subject or tgt not in members:
                        continue
                    q = row[tgt]
                    if q <= 0.0:
                        continue
                    extended.append((path + (tgt,), prefix + (g.label(tgt),), prob * q))
        frontier = extended
        depth += 1

    threshold = params.safe_threshold
    for v in sorted(members):
        total = total_acc.get(v, 0.0)
        intra = intra_acc.get(v, 0.0)
        has_external = any(n not in members for n in g.neighbors(v))
        if not has_external or total <= 0.0:
            m.per_vertex[v] = VertexScore(intra, total, VertexStatus.SAFE)
            continue
        if intra / total > threshold:
            m.per_vertex[v] = VertexScore(intra, total, VertexStatus.SAFE)
            continue
        m.per_vertex[v] = VertexScore(intra, total, VertexStatus.SCORED)
        m.rows_by_subject[v] = rows_by_subject.get(v, [])
        m.out_mass[v] = out_acc.get(v, {})
        for path, row, _prob in m.rows_by_subject[v]:
            m.rows[path] = row
    # rows of safe vertices are dropped except where they are prefixes of a
    # retained path, which chain products still need
    for path in list(m.rows):
        for j in range(1, len(path)):
            prefix = path[:j]
            if prefix not in m.rows:
                labels = tuple(g.label(x) for x in prefix)
                m.rows[prefix] = cache.get(g, trie, prefix[-1], labels)
    return m


def extroversion_ordering(m: TransitionMatrix) -> list[tuple[VertexId, float]]:
    """Scored vertices by descending extroversion, ties by ascending id."""
    scored = [(v, m.extroversion(v)) for v in m.scored_vertices()]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored
