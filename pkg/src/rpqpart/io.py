"""File codecs: TSV graph/partition/workload tables and JSON scenarios.

Vertex ids in files are arbitrary strings; they are mapped to dense
integers on load and written back through the same sidecar mapping.
Writers emit a `# <name> v1` comment header; readers skip comment lines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .engine import StreamScenario, generate_crossfade_stream, generate_periodic_stream
from .errors import RpqPartError
from .graph import LabeledGraph, Partitioning, build_graph
from .rpq import QueryExpr, parse


class FormatError(RpqPartError):
    pass


@dataclass
class GraphTable:
    """A graph plus the sidecar mapping between file ids and dense ids."""

    graph: LabeledGraph
    id_of: dict[str, int]
    name_of: list[str]


def _data_lines(path: Path) -> list[str]:
    lines = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        lines.append(line)
    return lines


def _fields(line: str, n: int, path: Path) -> list[str]:
    parts = line.split("\t")
    if len(parts) != n:
        raise FormatError(f"{path}: expected {n} tab-separated fields, got {line!r}")
    return parts


def load_graph(vertex_path: str | Path, edge_path: str | Path) -> GraphTable:
    vertex_path = Path(vertex_path)
    edge_path = Path(edge_path)
    id_of: dict[str, int] = {}
    name_of: list[str] = []
    vertex_records: list[tuple[int, str]] = []
    for line in _data_lines(vertex_path):
        name, label = _fields(line, 2, vertex_path)
        if name in id_of:
            raise FormatError(f"{vertex_path}: duplicate vertex id {name!r}")
        dense = len(name_of)
        id_of[name] = dense
        name_of.append(name)
        vertex_records.append((dense, label))
    edge_records: list[tuple[int, int]] = []
    for line in _data_lines(edge_path):
        src, dst = _fields(line, 2, edge_path)
        if src not in id_of or dst not in id_of:
            raise FormatError(f"{edge_path}: edge ({src},{dst}) references unknown vertex")
        edge_records.append((id_of[src], id_of[dst]))
    return GraphTable(build_graph(vertex_records, edge_records), id_of, name_of)


def write_graph(table: GraphTable, vertex_path: str | Path, edge_path: str | Path) -> None:
    g = table.graph
    v_lines = ["# vertices v1"]
    for v in sorted(g.vertices):
        v_lines.append(f"{table.name_of[v]}\t{g.label(v)}")
    Path(vertex_path).write_text("\n".join(v_lines) + "\n", encoding="utf-8")
    e_lines = ["# edges v1"]
    for v in sorted(g.vertices):
        for n in g.neighbors(v):
            if v < n:
                e_lines.append(f"{table.name_of[v]}\t{table.name_of[n]}")
    Path(edge_path).write_text("\n".join(e_lines) + "\n", encoding="utf-8")


def load_partition(path: str | Path, table: GraphTable, k: int | None = None) -> Partitioning:
    path = Path(path)
    assignment: dict[int, int] = {}
    for line in _data_lines(path):
        name, pid = _fields(line, 2, path)
        if name not in table.id_of:
            raise FormatError(f"{path}: unknown vertex id {name!r}")
        assignment[table.id_of[name]] = int(pid)
    missing = set(table.graph.vertices) - assignment.keys()
    if missing:
        raise FormatError(f"{path}: {len(missing)} vertices unassigned")
    if k is None:
        k = max(assignment.values()) + 1
    return Partitioning(assignment, k)


def write_partition(part: Partitioning, table: GraphTable, path: str | Path) -> None:
    lines = ["# partition v1"]
    for v in sorted(part.assignment):
        lines.append(f"{table.name_of[v]}\t{part.of(v)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_workload(path: str | Path) -> list[tuple[float, QueryExpr]]:
    """TSV `relative_frequency<TAB>rpq_text`, normalized to sum 1 on load."""
    path = Path(path)
    rows: list[tuple[float, QueryExpr]] = []
    for line in _data_lines(path):
        freq, text = _fields(line, 2, path)
        rows.append((float(freq), parse(text)))
    total = sum(f for f, _ in rows)
    if rows and total <= 0:
        raise FormatError(f"{path}: frequencies sum to {total}")
    return [(f / total, q) for f, q in rows]


def write_workload(rows: list[tuple[float, str]], path: str | Path) -> None:
    lines = ["# workload v1"]
    for freq, text in rows:
        lines.append(f"{freq:.10g}\t{text}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_stream(path: str | Path) -> list[tuple[int, QueryExpr]]:
    """TSV `tick<TAB>rpq_text` event list for simulation."""
    path = Path(path)
    events = []
    for line in _data_lines(path):
        tick, text = _fields(line, 2, path)
        events.append((int(tick), parse(text)))
    return events


def load_scenario(path: str | Path) -> StreamScenario:
    """JSON scenario: queries, period, horizon, schedule; kind selects the
    frequency shape (periodic by default, crossfade for two queries)."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    kind = payload.get("kind", "periodic")
    queries = [parse(text) for text in payload["queries"]]
    horizon = int(payload["horizon"])
    kwargs = {
        "measurement_interval": int(payload.get("measurement_interval", 1)),
        "invocation_schedule": tuple(payload.get("schedule", [])),
        "window_ticks": int(payload.get("window_ticks", 5)),
        "events_per_tick": int(payload.get("events_per_tick", 100)),
    }
    if kind == "periodic":
        period = int(payload.get("period", max(horizon, 1)))
        return generate_periodic_stream(queries, period, horizon, **kwargs)
    if kind == "crossfade":
        if len(queries) != 2:
            raise FormatError("crossfade scenarios take exactly two queries")
        return generate_crossfade_stream(queries[0], queries[1], horizon, **kwargs)
    raise FormatError(f"unknown scenario kind {kind!r}")


def write_scenario(payload: dict, path: str | Path) -> None:
    payload = {"version": 1, **payload}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
