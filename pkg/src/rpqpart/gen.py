"""Seeded random labelled graphs with community structure.

Vertices are grouped into communities; labels are drawn with a per-community
preferred label (probability `skew`, remainder uniform over the others) and
edges prefer endpoints inside the same community (fraction `1 - mixing`).
"""

from __future__ import annotations

import random

from .graph import LabeledGraph, build_graph
from .io import GraphTable


def generate_community_graph(n: int, avg_degree: float, n_labels: int,
                             n_communities: int, skew: float, mixing: float,
                             seed: int) -> LabeledGraph:
    if n < 2 or n_labels < 1 or n_communities < 1:
        raise ValueError("need n >= 2, n_labels >= 1, n_communities >= 1")
    rng = random.Random(seed)
    labels = "abcdefghijklmnopqrstuvwxyz"[:n_labels] if n_labels <= 26 else None
    label_names = ([f"l{i}" for i in range(n_labels)] if labels is None
                   else list(labels))

    community = [v * n_communities // n for v in range(n)]
    comm_members: list[list[int]] = [[] for _ in range(n_communities)]
    for v in range(n):
        comm_members[community[v]].append(v)

    vertex_records = []
    for v in range(n):
        preferred = label_names[community[v] % n_labels]
        if n_labels == 1 or rng.random() < skew:
            lab = preferred
        else:
            others = [x for x in label_names if x != preferred]
            lab = others[rng.randrange(len(others))]
        vertex_records.append((v, lab))

    edges: set[tuple[int, int]] = set()
    stubs = max(1, round(avg_degree / 2))
    for v in range(n):
        for _ in range(stubs):
            if rng.random() < mixing or len(comm_members[community[v]]) < 2:
                u = rng.randrange(n)
            else:
                pool = comm_members[community[v]]
                u = pool[rng.randrange(len(pool))]
            if u == v:
                continue
            edges.add((min(u, v), max(u, v)))
    return build_graph(vertex_records, sorted(edges))


def as_table(g: LabeledGraph) -> GraphTable:
    """Identity sidecar for generated graphs (dense ids as decimal strings)."""
    names = [str(v) for v in sorted(g.vertices)]
    return GraphTable(g, {name: int(name) for name in names}, names)
