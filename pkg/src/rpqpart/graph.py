"""Vertex-labelled undirected graph and k-way partition assignment."""

from __future__ import annotations

from collections import Counter
from typing import Iterable

from .errors import DuplicateVertexId, SelfLoop, UnknownEndpoint, UnknownVertex

VertexId = int
Label = str
PartitionId = int


class LabeledGraph:
    """Immutable undirected graph where every vertex carries exactly one label.

    Adjacency is symmetric, stored on both endpoints, and never contains
    self-loops. Instances are safe to share across concurrent readers.
    """

    __slots__ = ("_labels", "_adj", "_by_label")

    def __init__(self, labels: dict[VertexId, Label], adjacency: dict[VertexId, tuple[VertexId, ...]]):
        self._labels = labels
        self._adj = adjacency
        by_label: dict[Label, list[VertexId]] = {}
        for v in sorted(labels):
            by_label.setdefault(labels[v], []).append(v)
        self._by_label = {lab: tuple(vs) for lab, vs in by_label.items()}

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, v: VertexId) -> bool:
        return v in self._labels

    @property
    def vertices(self) -> Iterable[VertexId]:
        return self._labels.keys()

    def label(self, v: VertexId) -> Label:
        try:
            return self._labels[v]
        except KeyError:
            raise UnknownVertex(f"vertex {v} not in graph") from None

    def neighbors(self, v: VertexId) -> tuple[VertexId, ...]:
        try:
            return self._adj[v]
        except KeyError:
            raise UnknownVertex(f"vertex {v} not in graph") from None

    def degree(self, v: VertexId) -> int:
        return len(self.neighbors(v))

    def with_label(self, label: Label) -> tuple[VertexId, ...]:
        """All vertices carrying `label`, ascending."""
        return self._by_label.get(label, ())

    def labels(self) -> tuple[Label, ...]:
        return tuple(sorted(self._by_label))

    def edge_count(self) -> int:
        return sum(len(ns) for ns in self._adj.values()) // 2


def build_graph(vertex_records: Iterable[tuple[VertexId, Label]],
                edge_records: Iterable[tuple[VertexId, VertexId]]) -> LabeledGraph:
    """Build a LabeledGraph from id/label pairs and undirected edge pairs.

    Duplicate edges collapse to one; (u,v) and (v,u) denote the same edge.
    """
    labels: dict[VertexId, Label] = {}
    for v, lab in vertex_records:
        if v in labels:
            raise DuplicateVertexId(f"vertex id {v} listed twice")
        if v < 0:
            raise DuplicateVertexId(f"vertex id {v} is negative")
        labels[v] = lab
    adj: dict[VertexId, set[VertexId]] = {v: set() for v in labels}
    for u, v in edge_records:
        if u not in labels or v not in labels:
            raise UnknownEndpoint(f"edge ({u},{v}) references unknown vertex")
        if u == v:
            raise SelfLoop(f"self-loop on vertex {u}")
        adj[u].add(v)
        adj[v].add(u)
    frozen = {v: tuple(sorted(ns)) for v, ns in adj.items()}
    return LabeledGraph(labels, frozen)


class Partitioning:
    """Disjoint assignment of every vertex to one of k partitions.

    Mutated only through `move`; callers needing a stable view should `copy`.
    """

    __slots__ = ("k", "_assignment", "_sizes", "_members")

    def __init__(self, assignment: dict[VertexId, PartitionId], k: int):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self._assignment = dict(assignment)
        self._sizes = [0] * k
        self._members: list[set[VertexId]] = [set() for _ in range(k)]
        for v, pid in self._assignment.items():
            if not 0 <= pid < k:
                raise ValueError(f"partition id {pid} out of range for k={k}")
            self._sizes[pid] += 1
            self._members[pid].add(v)

    def __len__(self) -> int:
        return len(self._assignment)

    def of(self, v: VertexId) -> PartitionId:
        try:
            return self._assignment[v]
        except KeyError:
            raise UnknownVertex(f"vertex {v} not assigned") from None

    def members(self, pid: PartitionId) -> set[VertexId]:
        return self._members[pid]

    def size(self, pid: PartitionId) -> int:
        return self._sizes[pid]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(self._sizes)

    @property
    def assignment(self) -> dict[VertexId, PartitionId]:
        return self._assignment

    def move(self, v: VertexId, pid: PartitionId) -> None:
        old = self.of(v)
        if old == pid:
            return
        self._members[old].discard(v)
        self._members[pid].add(v)
        self._sizes[old] -= 1
        self._sizes[pid] += 1
        self._assignment[v] = pid

    def copy(self) -> "Partitioning":
        return Partitioning(self._assignment, self.k)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Partitioning)
                and self.k == other.k
                and self._assignment == other._assignment)


def is_boundary(g: LabeledGraph, p: Partitioning, v: VertexId) -> bool:
    """True iff some neighbor of v lies in a different partition."""
    pid = p.of(v)
    return any(p.of(n) != pid for n in g.neighbors(v))


def imbalance(p: Partitioning) -> float:
    """max_i size_i / (|V|/k) - 1; 0.0 means perfectly balanced."""
    n = len(p)
    if n == 0:
        raise ValueError("empty partitioning")
    return max(p.sizes) / (n / p.k) - 1.0


_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def hash_partition(g: LabeledGraph, k: int, seed: int) -> Partitioning:
    """Assign each vertex to `mix(seed, id) % k`; pure in its inputs."""
    if k < 1:
        raise ValueError("k must be >= 1")
    base = _splitmix64(seed & _MASK64)
    assignment = {v: _splitmix64(base ^ _splitmix64(v)) % k for v in g.vertices}
    return Partitioning(assignment, k)
