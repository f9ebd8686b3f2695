"""Family computation and the cooperative offer/receive swapping iteration.

Each iteration scores every partition, orders scored vertices by descending
extroversion, and processes partition queues round-robin. A candidate moves
together with its family: the recursive closure of same-partition neighbors
whose next traversal proceeds into a family member with probability above
the family threshold, read from the rows already held in the partition's
matrix. Receivers are cooperative: an offer is accepted only when the
family's would-be introversion inside the destination strictly exceeds the
introversion the sender gives up, and the destination stays within the
balance cap. A vertex moves at most once per iteration.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field

from .errors import CandidateIsSafe, NoExternalNeighbors
from .graph import (
    LabeledGraph,
    PartitionId,
    Partitioning,
    VertexId,
    imbalance,
)
from .transitions import (
    MatrixParams,
    RowCache,
    TransitionMatrix,
    VertexStatus,
    build_matrix,
    extroversion_ordering,
)
from .trie import PatternTrie


@dataclass(frozen=True)
class Family:
    """A swap candidate and the vertices that should accompany it."""

    candidate: VertexId
    members: frozenset[VertexId]
    origin: PartitionId

    def sorted_members(self) -> list[VertexId]:
        return sorted(self.members)


@dataclass(frozen=True)
class SwapOffer:
    family: Family
    destination: PartitionId
    sender_loss: float
    iteration: int


@dataclass(frozen=True)
class Decision:
    accepted: bool
    reason: str | None
    receiver_gain: float

    ACCEPT = "ACCEPT"
    REJECT = "REJECT"
    INSUFFICIENT_GAIN = "INSUFFICIENT_GAIN"
    BALANCE = "BALANCE"


@dataclass(frozen=True)
class EnhanceConfig:
    """Knobs for one enhancement invocation."""

    max_iterations: int = 8
    imbalance_cap: float = 0.05
    family_cap: int = 10
    family_threshold: float = 0.5
    t: int | None = None
    safe_threshold: float = 0.85
    length_cutoff: int | None = None
    top_k: int | None = None
    seed: int = 0

    def matrix_params(self, trie: PatternTrie) -> MatrixParams:
        t = self.t if self.t is not None else trie.max_depth()
        return MatrixParams(t=t, safe_threshold=self.safe_threshold,
                            length_cutoff=self.length_cutoff)


@dataclass
class IterationStats:
    iteration: int
    offers: int
    accepted: int
    vertices_moved: int
    imbalance: float
    weighted_ipt: float | None = None


@dataclass
class InvocationReport:
    iterations: list[IterationStats] = field(default_factory=list)
    swap_log: list[dict] = field(default_factory=list)
    total_vertices_moved: int = 0
    converged_early: bool = False

    @property
    def imbalance_trace(self) -> list[float]:
        return [s.imbalance for s in self.iterations]

    def to_json(self) -> str:
        payload = {
            "version": 1,
            "total_vertices_moved": self.total_vertices_moved,
            "converged_early": self.converged_early,
            "iterations": [
                {
                    "iteration": s.iteration,
                    "offers": s.offers,
                    "accepted": s.accepted,
                    "vertices_moved": s.vertices_moved,
                    "imbalance": s.imbalance,
                    "weighted_ipt": s.weighted_ipt,
                }
                for s in self.iterations
            ],
        }
        return json.dumps(payload, indent=2) + "\n"

    def swap_log_jsonl(self) -> str:
        return "".join(json.dumps(entry) + "\n" for entry in self.swap_log)


def family(g: LabeledGraph, matrix: TransitionMatrix, candidate: VertexId,
           threshold: float, cap: int,
           exclude: frozenset[VertexId] | set[VertexId] = frozenset()) -> Family:
    """Recursive closure of likely traversal sources around `candidate`.

    A same-partition neighbor n of a member m joins when the aggregate
    probability that a traversal from n proceeds to m, over n's rows,
    exceeds `threshold`. Scanning is in ascending vertex id and restarts
    after each addition, stopping at `cap` members. Neighbors without
    retained rows (safe or unreached vertices) never join.
    """
    if matrix.status(candidate) is not VertexStatus.SCORED:
        raise CandidateIsSafe(f"vertex {candidate} is not a scored swap candidate")
    members = {candidate}
    grown = True
    while grown and len(members) < cap:
        grown = False
        for m in sorted(members):
            for n in sorted(g.neighbors(m)):
                if n in members or n in exclude:
                    continue
                if matrix.status(n) is not VertexStatus.SCORED:
                    continue
                total = matrix.per_vertex[n].total
                mass = matrix.out_mass[n].get(m, 0.0)
                if total > 0.0 and mass / total > threshold:
                    members.add(n)
                    grown = True
                    break
            if grown:
                break
    return Family(candidate, frozenset(members), matrix.pid)


def preferred_destinations(g: LabeledGraph, part: Partitioning,
                           matrix: TransitionMatrix, fam: Family) -> list[PartitionId]:
    """Adjacent partitions by descending external probability mass from the
    family, ties broken by ascending partition id."""
    mass: dict[PartitionId, float] = {}
    adjacent: set[PartitionId] = set()
    for member in fam.sorted_members():
        for n in g.neighbors(member):
            pid = part.of(n)
            if pid != fam.origin:
                adjacent.add(pid)
        out = matrix.out_mass.get(member)
        if out:
            for tgt in sorted(out):
                if tgt == member:
                    continue
                pid = part.of(tgt)
                if pid != fam.origin:
                    mass[pid] = mass.get(pid, 0.0) + out[tgt]
    if not adjacent:
        raise NoExternalNeighbors(f"family of {fam.candidate} touches no other partition")
    return sorted(adjacent, key=lambda pid: (-mass.get(pid, 0.0), pid))


def _paths_ending_at(g: LabeledGraph, trie: PatternTrie, allowed: set[VertexId],
                     v: VertexId, max_len: int) -> list[tuple[VertexId, ...]]:
    """Structural paths inside `allowed` ending at v, pruned by the trie's
    substring index (ascending order for determinism)."""
    substrings = trie.prefix_substrings()
    out: list[tuple[VertexId, ...]] = []
    if (g.label(v),) not in substrings:
        return out
    out.append((v,))
    frontier: list[tuple[VertexId, ...]] = [(v,)]
    length = 1
    while frontier and length < max_len:
        grown: list[tuple[VertexId, ...]] = []
        for seq in frontier:
            head = seq[0]
            for u in sorted(g.neighbors(head)):
                if u not in allowed:
                    continue
                cand = (u,) + seq
                labels = tuple(g.label(x) for x in cand)
                if labels in substrings:
                    grown.append(cand)
        out.extend(grown)
        frontier = grown
        length += 1
    return out


def hypothetical_scores(g: LabeledGraph, trie: PatternTrie,
                        allowed: set[VertexId], label_count: Counter,
                        v: VertexId, params: MatrixParams,
                        cache: RowCache) -> tuple[float, float]:
    """(intra, total) mass for v as if `allowed` were its partition.

    Uses the same rows and priors as matrix construction but over an
    arbitrary membership set, so receivers can price an incoming family.
    """
    intra = 0.0
    total = 0.0
    for seq in _paths_ending_at(g, trie, allowed, v, params.max_path_len()):
        labels = tuple(g.label(x) for x in seq)
        if trie.node_at(labels) is None:
            continue
        head_label = labels[0]
        start = trie.prob_at((head_label,))
        if start <= 0.0:
            continue
        prob = start / label_count[head_label]
        for j in range(1, len(seq)):
            prob *= cache.get(g, trie, seq[j - 1], labels[:j]).get(seq[j], 0.0)
            if prob <= 0.0:
                break
        if prob <= 0.0:
            continue
        row = cache.get(g, trie, v, labels)
        intra += prob * sum(q for tgt, q in row.items() if tgt in allowed)
        total += prob
    return intra, total


def evaluate_offer(g: LabeledGraph, trie: PatternTrie, part: Partitioning,
                   offer: SwapOffer, eps: float, params: MatrixParams,
                   cache: RowCache,
                   dest_label_count: Counter) -> Decision:
    """Cooperative acceptance test for one offer against one destination.

    Gain is the family's total introversion were it resident in the
    destination; the offer is accepted only when gain strictly exceeds the
    sender's loss and the destination stays within the balance cap.
    """
    fam = offer.family
    members = fam.sorted_members()
    hypothetical = part.members(offer.destination) | fam.members
    counts = dest_label_count.copy()
    for m in members:
        counts[g.label(m)] += 1
    gain = 0.0
    for m in members:
        intra, total = hypothetical_scores(g, trie, hypothetical, counts, m,
                                           params, cache)
        if total > 0.0:
            gain += intra / total
    if gain <= offer.sender_loss:
        return Decision(False, Decision.INSUFFICIENT_GAIN, gain)
    limit = (1.0 + eps) * (len(part) / part.k)
    if part.size(offer.destination) + len(members) > limit + 1e-9:
        return Decision(False, Decision.BALANCE, gain)
    return Decision(True, None, gain)


def run_iteration(g: LabeledGraph, part: Partitioning, trie: PatternTrie,
                  matrices: dict[PartitionId, TransitionMatrix],
                  cfg: EnhanceConfig, iteration: int,
                  cache: RowCache,
                  label_counts: dict[PartitionId, Counter],
                  log: list[dict]) -> tuple[int, set[VertexId], int]:
    """One round of offers across all partitions.

    Returns (accepted offers, vertices moved, offers evaluated). Candidate
    queues come from the iteration-start matrices; balance bookkeeping and
    destination membership track the live partitioning.
    """
    params = cfg.matrix_params(trie)
    queues: dict[PartitionId, deque] = {}
    for pid in sorted(matrices):
        ordering = extroversion_ordering(matrices[pid])
        if cfg.top_k is not None:
            ordering = ordering[:cfg.top_k]
        queues[pid] = deque(ordering)

    moved: set[VertexId] = set()
    accepted = 0
    offers = 0
    while any(queues.values()):
        for pid in sorted(queues):
            queue = queues[pid]
            candidate = None
            while queue:
                v, _ext = queue.popleft()
                if v in moved or part.of(v) != pid:
                    continue
                candidate = v
                break
            if candidate is None:
                continue
            matrix = matrices[pid]
            fam = family(g, matrix, candidate, cfg.family_threshold,
                         cfg.family_cap, exclude=moved)
            sender_loss = sum(matrix.introversion(m) for m in fam.sorted_members())
            try:
                destinations = preferred_destinations(g, part, matrix, fam)
            except NoExternalNeighbors:
                continue
            for dest in destinations:
                offer = SwapOffer(fam, dest, sender_loss, iteration)
                decision = evaluate_offer(g, trie, part, offer,
                                          cfg.imbalance_cap, params, cache,
                                          label_counts[dest])
                offers += 1
                log.append({
                    "iteration": iteration,
                    "candidate": candidate,
                    "family": fam.sorted_members(),
                    "from": pid,
                    "to": dest,
                    "sender_loss": sender_loss,
                    "receiver_gain": decision.receiver_gain,
                    "decision": Decision.ACCEPT if decision.accepted else Decision.REJECT,
                    "reason": decision.reason,
                })
                if decision.accepted:
                    for m in fam.sorted_members():
                        part.move(m, dest)
                        label_counts[pid][g.label(m)] -= 1
                        label_counts[dest][g.label(m)] += 1
                    moved |= fam.members
                    accepted += 1
                    break
    return accepted, moved, offers


def enhance(g: LabeledGraph, p0: Partitioning, trie: PatternTrie,
            cfg: EnhanceConfig, measure_fn=None,
            cache: RowCache | None = None) -> tuple[Partitioning, InvocationReport]:
    """Run swapping iterations until quiescent or max_iterations reached.

    `measure_fn(partitioning) -> float`, when given, is recorded per
    iteration in the report (used for quality traces). The optional row
    cache is reused across iterations and invocations; invalidate it with
    the trie diff before calling when probabilities changed.
    """
    part = p0.copy()
    report = InvocationReport()
    params = cfg.matrix_params(trie)
    if params.t <= 0:
        report.converged_early = True
        return part, report
    cache = cache if cache is not None else RowCache()
    label_counts = {
        pid: Counter(g.label(v) for v in part.members(pid))
        for pid in range(part.k)
    }
    for iteration in range(1, cfg.max_iterations + 1):
        matrices = {pid: build_matrix(g, part, pid, trie, params, cache)
                    for pid in range(part.k)}
        accepted, moved, offers = run_iteration(
            g, part, trie, matrices, cfg, iteration, cache, label_counts,
            report.swap_log)
        report.total_vertices_moved += len(moved)
        report.iterations.append(IterationStats(
            iteration=iteration,
            offers=offers,
            accepted=accepted,
            vertices_moved=len(moved),
            imbalance=imbalance(part),
            weighted_ipt=measure_fn(part) if measure_fn is not None else None,
        ))
        if accepted == 0:
            report.converged_early = True
            break
    return part, report
