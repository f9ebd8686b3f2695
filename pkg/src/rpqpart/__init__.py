"""Workload-aware refinement of k-way graph partitionings for regular path
query workloads."""

from .graph import (
    LabeledGraph,
    Partitioning,
    build_graph,
    hash_partition,
    imbalance,
    is_boundary,
)
from .rpq import Alt, Atom, Concat, QueryExpr, Star, Union, Workload, expand, parse, render
from .trie import PatternTrie, TrieSnapshot
from .transitions import (
    MatrixParams,
    RowCache,
    TransitionMatrix,
    VertexStatus,
    build_matrix,
    extroversion_ordering,
    path_probability,
    transition_row,
)
from .swapper import (
    EnhanceConfig,
    Family,
    InvocationReport,
    SwapOffer,
    enhance,
    evaluate_offer,
    family,
    preferred_destinations,
    run_iteration,
)
from .pathexec import IptReport, evaluate_with_ipt, match_paths, measure_workload
from .engine import (
    StreamScenario,
    generate_crossfade_stream,
    generate_periodic_stream,
    run_scenario,
)

__all__ = [
    "Alt", "Atom", "Concat", "EnhanceConfig", "Family", "InvocationReport",
    "IptReport", "LabeledGraph", "MatrixParams", "PatternTrie", "Partitioning",
    "QueryExpr", "RowCache", "Star", "StreamScenario", "SwapOffer",
    "TransitionMatrix", "TrieSnapshot", "Union", "VertexStatus", "Workload",
    "build_graph", "build_matrix", "enhance", "evaluate_with_ipt",
    "evaluate_offer", "expand", "extroversion_ordering", "family",
    "generate_crossfade_stream", "generate_periodic_stream", "hash_partition",
    "imbalance", "is_boundary", "match_paths", "measure_workload", "parse",
    "path_probability", "preferred_destinations", "render", "run_iteration",
    "run_scenario", "transition_row",
]
