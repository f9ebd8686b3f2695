"""Streaming loop: feed workload events, keep the trie current, trigger
enhancement invocations on schedule, and emit a quality time series."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .graph import LabeledGraph, Partitioning
from .pathexec import measure_workload
from .rpq import QueryExpr, Workload, expand
from .swapper import EnhanceConfig, InvocationReport, enhance
from .transitions import RowCache
from .trie import PatternTrie

FREQ_TOL = 1e-9


@dataclass
class StreamScenario:
    """Query generators with per-tick frequencies plus the run schedule."""

    generators: list[tuple[QueryExpr, Callable[[int], float]]]
    horizon: int
    measurement_interval: int = 1
    invocation_schedule: tuple[int, ...] = ()
    window_ticks: int = 5
    events_per_tick: int = 100


@dataclass
class TickRecord:
    tick: int
    weighted_ipt: float
    invoked: bool
    swaps: int
    report: InvocationReport | None = None


def _proportional_counts(weights: list[float], total: int) -> list[int]:
    """Largest-remainder apportionment of `total` events; deterministic."""
    raw = [w * total for w in weights]
    counts = [int(math.floor(x)) for x in raw]
    short = total - sum(counts)
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[:short]:
        counts[i] += 1
    return counts


def generate_periodic_stream(queries: list[QueryExpr], period: int,
                             horizon: int, seed: int = 0,
                             **kwargs) -> StreamScenario:
    """Phase-shifted raised-cosine frequencies normalized to sum 1 per tick.

    With two queries half a period apart the curves are exact complements.
    The seed is kept for interface stability; event emission is exact
    proportional apportionment, so runs are deterministic regardless.
    """
    if not queries:
        raise ValueError("need at least one query")
    n = len(queries)

    def make(i: int) -> Callable[[int], float]:
        if n == 1:
            return lambda tick: 1.0
        phase = i / n

        def freq(tick: int) -> float:
            return (1.0 + math.cos(2.0 * math.pi * (tick / period - phase))) / n

        return freq

    generators = [(q, make(i)) for i, q in enumerate(queries)]
    return StreamScenario(generators=generators, horizon=horizon, **kwargs)


def generate_crossfade_stream(q_from: QueryExpr, q_to: QueryExpr,
                              horizon: int, seed: int = 0,
                              **kwargs) -> StreamScenario:
    """Linear crossfade: q_from 100% -> 0%, q_to 0% -> 100% over the horizon."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    generators = [
        (q_from, lambda tick: 1.0 - tick / horizon),
        (q_to, lambda tick: tick / horizon),
    ]
    return StreamScenario(generators=generators, horizon=horizon, **kwargs)


def run_scenario(g: LabeledGraph, p0: Partitioning, scenario: StreamScenario,
                 cfg: EnhanceConfig, star_cap: int = 3) -> list[TickRecord]:
    """Drive the scenario tick by tick; measure on the measurement grid and
    after every invocation, which runs enhance on the live partitioning."""
    events = [(tick, q, count)
              for tick in range(scenario.horizon + 1)
              for q, count in _tick_events(scenario, tick)]
    return run_event_stream(
        g, p0, events, cfg,
        horizon=scenario.horizon,
        measurement_interval=scenario.measurement_interval,
        invocation_schedule=scenario.invocation_schedule,
        window_ticks=scenario.window_ticks,
        star_cap=star_cap,
    )


def _tick_events(scenario: StreamScenario, tick: int) -> list[tuple[QueryExpr, int]]:
    weights = [fn(tick) for _q, fn in scenario.generators]
    total = sum(weights)
    if abs(total - 1.0) > FREQ_TOL:
        raise ValueError(f"generator frequencies sum to {total} at tick {tick}")
    counts = _proportional_counts(weights, scenario.events_per_tick)
    return [(q, c) for (q, _fn), c in zip(scenario.generators, counts)]


def run_event_stream(g: LabeledGraph, p0: Partitioning,
                     events: list[tuple[int, QueryExpr, int]],
                     cfg: EnhanceConfig, horizon: int,
                     measurement_interval: int = 1,
                     invocation_schedule: tuple[int, ...] = (),
                     window_ticks: int = 5,
                     star_cap: int = 3) -> list[TickRecord]:
    """Shared loop over an explicit (tick, query, count) event list."""
    part = p0.copy()
    workload = Workload(window_ticks)
    trie = PatternTrie()
    cache = RowCache()
    snap = trie.snapshot()
    schedule = set(invocation_schedule)
    by_tick: dict[int, list[tuple[QueryExpr, int]]] = {}
    for tick, q, count in events:
        by_tick.setdefault(tick, []).append((q, count))

    expansions: dict[str, set] = {}
    tagged: set[str] = set()
    records: list[TickRecord] = []
    for tick in range(horizon + 1):
        for q, count in by_tick.get(tick, []):
            for _ in range(count):
                workload.record(q, tick)
        freqs = workload.frequencies(tick)
        for tag in sorted(tagged - freqs.keys()):
            trie.remove_query(tag)
            tagged.discard(tag)
        for qh in sorted(freqs.keys() - tagged):
            expr = workload.expr(qh)
            if qh not in expansions:
                expansions[qh] = expand(expr, star_cap)
            trie.insert_query(expr, expansions[qh])
            tagged.add(qh)
        trie.recompute_probabilities(freqs)

        invoked = tick in schedule
        report = None
        swaps = 0
        if invoked:
            cache.invalidate(trie.diff_since(snap))
            snap = trie.snapshot()
            part, report = enhance(g, part, trie, cfg, cache=cache)
            swaps = sum(s.accepted for s in report.iterations)
        if invoked or tick % measurement_interval == 0:
            measured = measure_workload(g, part, workload, tick, star_cap)
            records.append(TickRecord(tick, measured.weighted_ipt, invoked,
                                      swaps, report))
    return records


def series_to_csv(records: list[TickRecord]) -> str:
    lines = ["tick,weighted_ipt,invoked,swaps"]
    for r in records:
        lines.append(f"{r.tick},{r.weighted_ipt:.10g},{int(r.invoked)},{r.swaps}")
    return "\n".join(lines) + "\n"
