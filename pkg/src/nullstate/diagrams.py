"""Noncrossing arc diagrams and the orders in which their arcs may be collapsed.

Points are the indices ``1..2N``; coordinates enter only in ``limits``.  The
lexicographic order of ``enumerate_diagrams`` is the connectivity index used
everywhere else (dual vectors, CLI output).

Rule for a collapse sequence: when arc ``k`` is collapsed, every arc still
left must lie inside it or every arc still left must lie outside it.  All
inside means the arc is collapsed by sending its endpoints to infinity
(``outer_collapse``); all outside means its interval is shrunk to a point
(``interval_collapse``).  For the final arc both kinds give the same number
and either tag is accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .specfun import ParameterError

INTERVAL = "interval_collapse"
OUTER = "outer_collapse"
KINDS = (INTERVAL, OUTER)

MAX_CATALAN_N = 30
MAX_DIAGRAM_N = 10


def catalan(n: int) -> int:
    if int(n) != n or n < 0:
        raise ParameterError(f"catalan needs a nonnegative integer, got {n}")
    if n > MAX_CATALAN_N:
        raise OverflowError(f"catalan({n}) does not fit the 64-bit guard (n <= {MAX_CATALAN_N})")
    return math.comb(2 * n, n) // (n + 1)


Pair = tuple[int, int]


@dataclass(frozen=True)
class ArcDiagram:
    n_pairs: int
    pairs: tuple[Pair, ...]

    def __post_init__(self):
        pairs = tuple(sorted((min(p), max(p)) for p in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        n = self.n_pairs
        if len(pairs) != n:
            raise ParameterError(f"expected {n} pairs, got {len(pairs)}")
        used = sorted(i for p in pairs for i in p)
        if used != list(range(1, 2 * n + 1)):
            raise ParameterError(f"pairs {pairs} do not use every index 1..{2 * n} exactly once")
        for a, b in pairs:
            for c, d in pairs:
                if a < c < b < d:
                    raise ParameterError(f"arcs {(a, b)} and {(c, d)} cross")

    def contains(self, outer: Pair, inner: Pair) -> bool:
        return outer[0] < inner[0] and inner[1] < outer[1]

    def to_dict(self) -> dict:
        return {"n_pairs": self.n_pairs, "pairs": [list(p) for p in self.pairs]}


@lru_cache(maxsize=None)
def _matchings(lo: int, hi: int) -> tuple[tuple[Pair, ...], ...]:
    # noncrossing perfect matchings of lo..hi (inclusive, even count)
    if lo > hi:
        return ((),)
    out = []
    for partner in range(lo + 1, hi + 1, 2):
        for inside in _matchings(lo + 1, partner - 1):
            for rest in _matchings(partner + 1, hi):
                out.append(((lo, partner),) + inside + rest)
    return tuple(out)


def enumerate_diagrams(n_pairs: int) -> list[ArcDiagram]:
    """All ``catalan(n_pairs)`` diagrams, sorted lexicographically by pair list."""
    if int(n_pairs) != n_pairs or n_pairs < 1:
        raise ParameterError(f"n_pairs must be a positive integer, got {n_pairs}")
    if n_pairs > MAX_DIAGRAM_N:
        raise ParameterError(f"n_pairs = {n_pairs} above the enumeration guard {MAX_DIAGRAM_N}")
    return sorted((ArcDiagram(n_pairs, m) for m in _matchings(1, 2 * n_pairs)), key=lambda d: d.pairs)


def diagram_index(d: ArcDiagram) -> int:
    """Zero-based position of ``d`` in ``enumerate_diagrams(d.n_pairs)``."""
    return [e.pairs for e in enumerate_diagrams(d.n_pairs)].index(d.pairs)


@dataclass(frozen=True)
class LimitSequence:
    """``order[k]`` is the 1-based position (in ``diagram.pairs``) of the k-th arc
    collapsed and ``kinds[k]`` is how it is collapsed."""

    diagram: ArcDiagram
    order: tuple[int, ...]
    kinds: tuple[str, ...]

    def arcs(self) -> list[Pair]:
        return [self.diagram.pairs[j - 1] for j in self.order]

    def to_dict(self) -> dict:
        return {"diagram": self.diagram.to_dict(), "order": list(self.order),
                "arcs": [list(a) for a in self.arcs()], "kinds": list(self.kinds)}


class Verdict(NamedTuple):
    ok: bool
    rule: str | None = None
    step: int | None = None

    def __bool__(self):
        return self.ok


def _side(arc: Pair, others: list[Pair]) -> str | None:
    """'inside' / 'outside' if every other arc is on that side of ``arc``, else None."""
    if all(arc[0] < o[0] and o[1] < arc[1] for o in others):
        return "inside"
    if all(e < arc[0] or e > arc[1] for o in others for e in o):
        return "outside"
    return None


def validate_sequence(s: LimitSequence) -> Verdict:
    n = s.diagram.n_pairs
    if sorted(s.order) != list(range(1, n + 1)):
        return Verdict(False, f"order {s.order} is not a permutation of 1..{n}")
    if len(s.kinds) != n or any(k not in KINDS for k in s.kinds):
        return Verdict(False, f"kinds must be {n} tags from {KINDS}")
    arcs = s.arcs()
    for k in range(n - 1):
        side = _side(arcs[k], arcs[k + 1:])
        if side == "inside" and s.kinds[k] != OUTER:
            return Verdict(False, "remaining arcs lie inside the collapsed arc, which requires outer_collapse", k)
        if side == "outside" and s.kinds[k] != INTERVAL:
            return Verdict(False, "remaining arcs lie outside the collapsed arc, which requires interval_collapse", k)
        if side is None:
            return Verdict(False, "remaining arcs lie on both sides of the collapsed arc", k)
    return Verdict(True)


def allowable_sequences(d: ArcDiagram) -> list[LimitSequence]:
    """Every valid (order, kinds) pair for ``d``; the last arc appears once with each tag."""
    out: list[LimitSequence] = []

    def extend(remaining: list[int], order: list[int], kinds: list[str]):
        if len(remaining) == 1:
            for kind in KINDS:
                out.append(LimitSequence(d, tuple(order + remaining), tuple(kinds + [kind])))
            return
        for j in remaining:
            rest = [r for r in remaining if r != j]
            side = _side(d.pairs[j - 1], [d.pairs[r - 1] for r in rest])
            if side is not None:
                extend(rest, order + [j], kinds + [OUTER if side == "inside" else INTERVAL])

    extend(list(range(1, d.n_pairs + 1)), [], [])
    return out


def same_equivalence_class(a: LimitSequence, b: LimitSequence) -> bool:
    return a.diagram.pairs == b.diagram.pairs
