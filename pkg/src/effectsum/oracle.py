"""Brute-force reference implementation of the effect-region query semantics.

A facility with radius ``d'`` on vertex ``u`` affects a query circle of radius
``d`` around ``v`` iff ``dist(u, v) <= d + d'`` (closed inequality).  This
module embodies that definition by linear scan and is the oracle every
equivalence test compares against.  Performance is a non-goal.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

from .core import Facility, Graph, INT_SUM, Semigroup


class NaiveIndex:
    """Linear-scan index over the live facilities, with cached distance rows."""

    def __init__(self, graph: Graph, semigroup: Semigroup = INT_SUM):
        self.graph = graph
        self.semigroup = semigroup
        self._facilities: Dict[str, Facility] = {}
        self._rows: Dict[str, Dict[str, int]] = {}

    def _row(self, v: str) -> Dict[str, int]:
        row = self._rows.get(v)
        if row is None:
            row = self.graph.distances_from(v)
            self._rows[v] = row
        return row

    @property
    def live(self) -> int:
        return len(self._facilities)

    def facilities(self) -> List[Facility]:
        return [self._facilities[f] for f in sorted(self._facilities)]

    def add(self, v: str, fid: str, weight, radius: int) -> None:
        self.graph.require_vertex(v)
        if radius < 0:
            raise ValueError(f"negative effect radius {radius!r}")
        if fid in self._facilities:
            raise ValueError(f"facility {fid!r} already placed")
        self._facilities[fid] = Facility(fid, weight, radius, v)

    def remove(self, v: str, fid: str) -> None:
        fac = self._facilities.get(fid)
        if fac is None:
            raise ValueError(f"facility {fid!r} is not placed")
        if fac.home != v:
            raise ValueError(f"facility {fid!r} is placed on {fac.home!r}, not {v!r}")
        del self._facilities[fid]

    def _qualifying(self, v: str, d: int) -> List[Facility]:
        self.graph.require_vertex(v)
        if d < 0:
            raise ValueError(f"negative query radius {d!r}")
        row = self._row(v)
        out = []
        for fid in sorted(self._facilities):
            fac = self._facilities[fid]
            if row[fac.home] <= d + fac.radius:
                out.append(fac)
        return out

    def sum(self, v: str, d: int = 0):
        """Semigroup fold, in ascending facility-id order; None when empty."""
        total = None
        plus = self.semigroup.plus
        for fac in self._qualifying(v, d):
            total = fac.weight if total is None else plus(total, fac.weight)
        return total

    def top(self, v: str, k: int, d: int = 0) -> List[Tuple[str, object]]:
        """The k heaviest qualifying facilities; ties favour the smaller id."""
        if not self.semigroup.ordered:
            raise ValueError(f"semigroup {self.semigroup.name!r} is not ordered")
        if k < 0:
            raise ValueError("k must be >= 0")
        ranked = sorted(self._qualifying(v, d), key=_rank_key)
        return [(fac.fid, fac.weight) for fac in ranked[:k]]


def _rank_key(fac: Facility):
    return (_Desc(fac.weight), fac.fid)


class _Desc:
    """Inverts the natural order so sorted() ranks heavier weights first."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __lt__(self, other) -> bool:
        return other.value < self.value

    def __eq__(self, other) -> bool:
        return self.value == other.value
