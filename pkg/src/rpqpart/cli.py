"""Command-line front door.

Subcommands: partition, enhance, measure, stream-sim, gen-graph.
All runs are deterministic under fixed seeds. The RPQPART_LOG environment
variable sets the log level; everything else comes from flags.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import gen, io
from .errors import PartitionCountExceedsVertices, RpqPartError
from .graph import hash_partition, imbalance
from .pathexec import measure_workload
from .rpq import Workload, expand
from .swapper import EnhanceConfig, enhance
from .engine import run_scenario, series_to_csv
from .trie import PatternTrie

log = logging.getLogger("rpqpart")


def _add_graph_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--vertices", required=True, help="vertex TSV (id<TAB>label)")
    sp.add_argument("--edges", required=True, help="edge TSV (src<TAB>dst)")


def _add_vm_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--t", type=int, default=None,
                    help="max traversal memory; default: longest workload pattern")
    sp.add_argument("--safe-threshold", type=float, default=0.85)
    sp.add_argument("--length-cutoff", type=int, default=None)
    sp.add_argument("--epsilon", type=float, default=0.05,
                    help="max partition imbalance")
    sp.add_argument("--max-iterations", type=int, default=8)
    sp.add_argument("--star-cap", type=int, default=3)


def _check_files(*paths: str) -> None:
    for p in paths:
        if not Path(p).is_file():
            raise RpqPartError(f"no such file: {p}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rpqpart",
                                 description="Workload-aware graph partition refinement")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("partition", help="hash-partition a graph")
    _add_graph_args(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True, help="partition TSV output")

    sp = sub.add_parser("enhance", help="refine a partitioning for a workload")
    _add_graph_args(sp)
    sp.add_argument("--partition", required=True)
    sp.add_argument("--workload", required=True,
                    help="workload TSV (frequency<TAB>rpq)")
    sp.add_argument("--out", required=True, help="refined partition TSV")
    sp.add_argument("--report", default=None, help="invocation report JSON")
    sp.add_argument("--swap-log", default=None, help="per-offer JSONL log")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--family-cap", type=int, default=10)
    sp.add_argument("--family-threshold", type=float, default=0.5)
    _add_vm_args(sp)

    sp = sub.add_parser("measure", help="count inter-partition traversals")
    _add_graph_args(sp)
    sp.add_argument("--partition", required=True)
    sp.add_argument("--workload", required=True)
    sp.add_argument("--out", default=None, help="report JSON output")
    sp.add_argument("--csv", default=None, help="report CSV output")
    sp.add_argument("--star-cap", type=int, default=3)

    sp = sub.add_parser("stream-sim", help="simulate a workload stream")
    _add_graph_args(sp)
    sp.add_argument("--partition", required=True)
    sp.add_argument("--scenario", required=True, help="scenario JSON")
    sp.add_argument("--out", required=True, help="time series CSV")
    sp.add_argument("--seed", type=int, default=0)
    _add_vm_args(sp)

    sp = sub.add_parser("gen-graph", help="generate a seeded community graph")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--avg-degree", type=float, default=6.0)
    sp.add_argument("--labels", type=int, default=4)
    sp.add_argument("--communities", type=int, default=16)
    sp.add_argument("--skew", type=float, default=0.7)
    sp.add_argument("--mixing", type=float, default=0.1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out-vertices", required=True)
    sp.add_argument("--out-edges", required=True)
    return ap


def _workload_trie(rows, star_cap: int) -> tuple[PatternTrie, dict[str, float], Workload]:
    trie = PatternTrie()
    workload = Workload(window_length=1)
    freqs: dict[str, float] = {}
    tick = 0
    for freq, q in rows:
        trie.insert_query(q, expand(q, star_cap))
        freqs[q.hash] = freqs.get(q.hash, 0.0) + freq
        workload.registry[q.hash] = q
        tick += 1
    trie.recompute_probabilities(freqs)
    return trie, freqs, workload


def cmd_partition(args) -> int:
    _check_files(args.vertices, args.edges)
    table = io.load_graph(args.vertices, args.edges)
    if args.k > len(table.graph):
        raise PartitionCountExceedsVertices(
            f"k={args.k} exceeds |V|={len(table.graph)}")
    part = hash_partition(table.graph, args.k, args.seed)
    io.write_partition(part, table, args.out)
    print(f"wrote {args.out}; imbalance {imbalance(part):.4f}")
    return 0


def _enhance_config(args) -> EnhanceConfig:
    return EnhanceConfig(
        max_iterations=args.max_iterations,
        imbalance_cap=args.epsilon,
        family_cap=args.family_cap,
        family_threshold=args.family_threshold,
        t=args.t,
        safe_threshold=args.safe_threshold,
        length_cutoff=args.length_cutoff,
        seed=args.seed,
    )


def cmd_enhance(args) -> int:
    _check_files(args.vertices, args.edges, args.partition, args.workload)
    table = io.load_graph(args.vertices, args.edges)
    part = io.load_partition(args.partition, table)
    rows = io.load_workload(args.workload)
    trie, freqs, workload = _workload_trie(rows, args.star_cap)
    cfg = _enhance_config(args)

    def measure(p):
        report = measure_workload(table.graph, p, _as_snapshot(workload, freqs),
                                  now=0, star_cap=args.star_cap)
        return report.weighted_ipt

    refined, report = enhance(table.graph, part, trie, cfg, measure_fn=measure)
    io.write_partition(refined, table, args.out)
    if args.report:
        Path(args.report).write_text(report.to_json(), encoding="utf-8")
    if args.swap_log:
        Path(args.swap_log).write_text(report.swap_log_jsonl(), encoding="utf-8")
    swaps = sum(s.accepted for s in report.iterations)
    print(f"wrote {args.out}; {swaps} swaps over {len(report.iterations)} iterations; "
          f"imbalance {imbalance(refined):.4f}")
    return 0


def _as_snapshot(workload: Workload, freqs: dict[str, float]) -> Workload:
    """Workload whose window holds each query proportionally to freqs."""
    snap = Workload(window_length=1)
    snap.registry.update(workload.registry)
    scale = 10_000
    for qh in sorted(freqs):
        count = round(freqs[qh] * scale)
        for _ in range(max(count, 1)):
            snap.events.append((qh, 0))
    return snap


def cmd_measure(args) -> int:
    _check_files(args.vertices, args.edges, args.partition, args.workload)
    table = io.load_graph(args.vertices, args.edges)
    part = io.load_partition(args.partition, table)
    rows = io.load_workload(args.workload)
    _trie, freqs, workload = _workload_trie(rows, args.star_cap)
    report = measure_workload(table.graph, part, _as_snapshot(workload, freqs),
                              now=0, star_cap=args.star_cap)
    if args.out:
        Path(args.out).write_text(report.to_json(), encoding="utf-8")
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    print(f"total_ipt {report.total_ipt}; weighted_ipt {report.weighted_ipt:.6g}")
    return 0


def cmd_stream_sim(args) -> int:
    _check_files(args.vertices, args.edges, args.partition, args.scenario)
    table = io.load_graph(args.vertices, args.edges)
    part = io.load_partition(args.partition, table)
    scenario = io.load_scenario(args.scenario)
    cfg = _enhance_config(args)
    records = run_scenario(table.graph, part, scenario, cfg, star_cap=args.star_cap)
    Path(args.out).write_text(series_to_csv(records), encoding="utf-8")
    print(f"wrote {args.out}; {len(records)} measurements")
    return 0


def cmd_gen_graph(args) -> int:
    g = gen.generate_community_graph(args.n, args.avg_degree, args.labels,
                                     args.communities, args.skew, args.mixing,
                                     args.seed)
    table = gen.as_table(g)
    io.write_graph(table, args.out_vertices, args.out_edges)
    print(f"wrote {args.out_vertices} ({len(g)} vertices), "
          f"{args.out_edges} ({g.edge_count()} edges)")
    return 0


_COMMANDS = {
    "partition": cmd_partition,
    "enhance": cmd_enhance,
    "measure": cmd_measure,
    "stream-sim": cmd_stream_sim,
    "gen-graph": cmd_gen_graph,
}


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("RPQPART_LOG", "WARNING").upper())
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except RpqPartError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
