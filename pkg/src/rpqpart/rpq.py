"""Regular path query syntax: parsing, expansion to label strings, and
sliding-window workload frequency tracking.

Grammar accepted by `parse` (whitespace between tokens is ignored):

    expr   ::= concat (('+' | '|') concat)*      lowest precedence, left-assoc
    concat ::= star ('.' star)*
    star   ::= primary '*'*                      tightest
    primary::= IDENT | '(' expr ')'
    IDENT  ::= [A-Za-z_][A-Za-z0-9_]*

`.` concatenates, `+` is union, `|` is alternation, postfix `*` is closure.
Union and alternation have identical extensions over label strings and are
expanded identically; the AST keeps them distinct.
"""

from __future__ import annotations

import hashlib
import random
from collections import Counter, deque
from dataclasses import dataclass
from functools import lru_cache

from .errors import ExpansionOverflow, NonMonotoneTimestamp, RpqSyntaxError

LabelString = tuple[str, ...]

DEFAULT_EXPANSION_BOUND = 100_000


class QueryExpr:
    """Base class for query expression trees."""

    __slots__ = ()

    def canonical(self) -> str:
        raise NotImplementedError

    @property
    def hash(self) -> str:
        return query_hash(self)


@dataclass(frozen=True, slots=True)
class Atom(QueryExpr):
    label: str

    def canonical(self) -> str:
        return self.label


@dataclass(frozen=True, slots=True)
class Concat(QueryExpr):
    left: QueryExpr
    right: QueryExpr

    def canonical(self) -> str:
        return f"(. {self.left.canonical()} {self.right.canonical()})"


@dataclass(frozen=True, slots=True)
class Union(QueryExpr):
    left: QueryExpr
    right: QueryExpr

    def canonical(self) -> str:
        return f"(+ {self.left.canonical()} {self.right.canonical()})"


@dataclass(frozen=True, slots=True)
class Alt(QueryExpr):
    left: QueryExpr
    right: QueryExpr

    def canonical(self) -> str:
        return f"(| {self.left.canonical()} {self.right.canonical()})"


@dataclass(frozen=True, slots=True)
class Star(QueryExpr):
    inner: QueryExpr

    def canonical(self) -> str:
        return f"(* {self.inner.canonical()})"


@lru_cache(maxsize=4096)
def query_hash(e: QueryExpr) -> str:
    """Stable digest of the expression tree, identical across runs."""
    return hashlib.sha256(e.canonical().encode("utf-8")).hexdigest()[:16]


# ---------------------------------------------------------------- parsing

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise RpqSyntaxError(msg, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else None

    def expr(self) -> QueryExpr:
        node = self.concat()
        while True:
            c = self.peek()
            if c == "+":
                self.pos += 1
                node = Union(node, self.concat())
            elif c == "|":
                self.pos += 1
                node = Alt(node, self.concat())
            else:
                return node

    def concat(self) -> QueryExpr:
        node = self.star()
        while self.peek() == ".":
            self.pos += 1
            node = Concat(node, self.star())
        return node

    def star(self) -> QueryExpr:
        node = self.primary()
        while self.peek() == "*":
            self.pos += 1
            node = Star(node)
        return node

    def primary(self) -> QueryExpr:
        c = self.peek()
        if c is None:
            self.error("unexpected end of input")
        if c == "(":
            self.pos += 1
            node = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return node
        if c in _IDENT_START:
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos] in _IDENT_CONT:
                self.pos += 1
            return Atom(self.text[start:self.pos])
        self.error(f"unexpected character {c!r}")


def parse(text: str) -> QueryExpr:
    """Parse query text into an expression tree.

    Raises RpqSyntaxError carrying the byte offset of the first bad token.
    """
    p = _Parser(text)
    node = p.expr()
    if p.peek() is not None:
        p.error(f"trailing input {p.text[p.pos]!r}")
    return node


def render(e: QueryExpr) -> str:
    """Text form that parses back to a structurally identical tree."""
    def prec(x: QueryExpr) -> int:
        if isinstance(x, (Union, Alt)):
            return 0
        if isinstance(x, Concat):
            return 1
        return 2

    def go(x: QueryExpr, level: int) -> str:
        if isinstance(x, Atom):
            s = x.label
        elif isinstance(x, Star):
            s = go(x.inner, 3) + "*"
        elif isinstance(x, Concat):
            s = go(x.left, 1) + "." + go(x.right, 2)
        elif isinstance(x, Union):
            s = go(x.left, 0) + "+" + go(x.right, 1)
        elif isinstance(x, Alt):
            s = go(x.left, 0) + "|" + go(x.right, 1)
        else:
            raise TypeError(f"not a query expression: {x!r}")
        return f"({s})" if prec(x) < level else s

    return go(e, 0)


# -------------------------------------------------------------- expansion

def expand(e: QueryExpr, star_cap: int, max_strings: int = DEFAULT_EXPANSION_BOUND) -> set[LabelString]:
    """All label strings the expression can spell, as label tuples.

    Closure is truncated at `star_cap` repetitions; union and alternation
    both expand to the union of their sides. The result is duplicate-free
    and may contain the empty string at the top level.
    """
    if star_cap < 0:
        raise ValueError("star_cap must be >= 0")

    def check(s: set[LabelString]) -> set[LabelString]:
        if len(s) > max_strings:
            raise ExpansionOverflow(f"expansion exceeds {max_strings} strings")
        return s

    def go(x: QueryExpr) -> set[LabelString]:
        if isinstance(x, Atom):
            return {(x.label,)}
        if isinstance(x, (Union, Alt)):
            return check(go(x.left) | go(x.right))
        if isinstance(x, Concat):
            left, right = go(x.left), go(x.right)
            return check({a + b for a in left for b in right})
        if isinstance(x, Star):
            base = go(x.inner)
            out: set[LabelString] = {()}
            power: set[LabelString] = {()}
            for _ in range(star_cap):
                power = check({a + b for a in power for b in base})
                before = len(out)
                out = check(out | power)
                if len(out) == before:
                    break
            return out
        raise TypeError(f"not a query expression: {x!r}")

    return check(go(e))


# --------------------------------------------------------------- workload

class Workload:
    """Time-ordered stream of query events with windowed relative frequencies.

    Timestamps are abstract non-negative integer ticks and must be recorded
    monotonically. An event influences frequencies while `now - t < window`.
    The default mode counts exactly; mode="sampled" keeps each event with
    probability `sample_rate` (seeded), trading accuracy for space.
    """

    def __init__(self, window_length: int, mode: str = "exact",
                 sample_rate: float = 0.1, seed: int = 0):
        if window_length <= 0:
            raise ValueError("window_length must be positive")
        if mode not in ("exact", "sampled"):
            raise ValueError(f"unknown mode {mode!r}")
        self.window_length = window_length
        self.mode = mode
        self.sample_rate = sample_rate
        self.events: deque[tuple[str, int]] = deque()
        self.registry: dict[str, QueryExpr] = {}
        self._rng = random.Random(seed)
        self._last_ts: int | None = None

    def record(self, q: QueryExpr, t: int) -> None:
        if self._last_ts is not None and t < self._last_ts:
            raise NonMonotoneTimestamp(f"timestamp {t} precedes {self._last_ts}")
        self._last_ts = t
        self.registry[q.hash] = q
        if self.mode == "exact" or self._rng.random() < self.sample_rate:
            self.events.append((q.hash, t))

    def frequencies(self, now: int) -> dict[str, float]:
        """In-window event counts normalized to sum 1; {} when empty."""
        cutoff = now - self.window_length
        while self.events and self.events[0][1] <= cutoff:
            self.events.popleft()
        counts = Counter(h for h, t in self.events if t <= now)
        total = sum(counts.values())
        if total == 0:
            return {}
        return {h: counts[h] / total for h in sorted(counts)}

    def expr(self, query_hash: str) -> QueryExpr:
        return self.registry[query_hash]


def record_query(w: Workload, q: QueryExpr, t: int) -> Workload:
    """Functional-style alias for Workload.record; returns the workload."""
    w.record(q, t)
    return w


def frequencies(w: Workload, now: int) -> dict[str, float]:
    return w.frequencies(now)
