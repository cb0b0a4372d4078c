"""Edge-weighted graph model, shortest paths, semigroup weights, facilities.

Distances are exact integers (scale fractional inputs to a fixed point before
loading); all comparisons the query structures rely on are therefore free of
rounding ties.  Graphs are undirected, connected, with non-negative lengths.
Parallel edges are collapsed to their minimum length at load; self-loops are
rejected.
"""

from __future__ import annotations

import heapq
import operator
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Tuple

Vertex = str
Distance = int


class GraphError(ValueError):
    """Malformed graph, decomposition, or script input."""


@dataclass(frozen=True)
class Semigroup:
    """Associative weight addition.  No identity or inverses are assumed.

    ``ordered`` marks semigroups whose elements are totally ordered; top-k
    queries are only available over ordered semigroups.
    """

    name: str
    plus: Callable
    ordered: bool = False

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Semigroup({self.name})"


INT_SUM = Semigroup("int-sum", operator.add, ordered=True)
INT_MIN = Semigroup("int-min", min)
INT_MAX = Semigroup("int-max", max)
STR_CONCAT = Semigroup("str-concat", operator.add)  # non-commutative

SEMIGROUPS = {sg.name: sg for sg in (INT_SUM, INT_MIN, INT_MAX, STR_CONCAT)}


def merge_opt(sg: Semigroup, a, b):
    """Fold two optional partial sums; ``None`` is the empty marker."""
    if a is None:
        return b
    if b is None:
        return a
    return sg.plus(a, b)


@dataclass(frozen=True)
class Facility:
    """A placed facility: unique id, weight, non-negative effect radius, home vertex."""

    fid: str
    weight: object
    radius: Distance
    home: Vertex


class Graph:
    """Undirected connected graph with non-negative integer edge lengths.

    Immutable after construction; safe to share between threads.
    Edge ids are declaration indices (after parallel-edge collapse, the first
    declaration wins the id and keeps the minimum length).
    """

    __slots__ = ("_order", "_adj", "_edges")

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[Tuple[Vertex, Vertex, Distance]]):
        self._order: List[Vertex] = []
        seen = set()
        for v in vertices:
            if v in seen:
                raise GraphError(f"duplicate vertex {v!r}")
            seen.add(v)
            self._order.append(v)
        if not self._order:
            raise GraphError("graph has no vertices")

        self._edges: List[Tuple[Vertex, Vertex, Distance]] = []
        by_pair: Dict[Tuple[Vertex, Vertex], int] = {}
        for u, v, w in edges:
            if u not in seen or v not in seen:
                raise GraphError(f"edge ({u!r}, {v!r}) references an undeclared vertex")
            if u == v:
                raise GraphError(f"self-loop on {u!r}")
            if not isinstance(w, int) or w < 0:
                raise GraphError(f"edge ({u!r}, {v!r}) has invalid length {w!r}")
            pair = (u, v) if u <= v else (v, u)
            idx = by_pair.get(pair)
            if idx is None:
                by_pair[pair] = len(self._edges)
                self._edges.append((u, v, w))
            elif w < self._edges[idx][2]:
                eu, ev, _ = self._edges[idx]
                self._edges[idx] = (eu, ev, w)

        self._adj: Dict[Vertex, List[Tuple[Vertex, Distance, int]]] = {v: [] for v in self._order}
        for eid, (u, v, w) in enumerate(self._edges):
            self._adj[u].append((v, w, eid))
            self._adj[v].append((u, w, eid))

        self._check_connected()

    def _check_connected(self) -> None:
        start = self._order[0]
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v, _, _ in self._adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != len(self._order):
            missing = next(v for v in self._order if v not in seen)
            raise GraphError(f"graph is disconnected ({missing!r} unreachable)")

    @property
    def vertices(self) -> List[Vertex]:
        return list(self._order)

    @property
    def n(self) -> int:
        return len(self._order)

    @property
    def edges(self) -> List[Tuple[Vertex, Vertex, Distance]]:
        return list(self._edges)

    def has_vertex(self, v: Vertex) -> bool:
        return v in self._adj

    def require_vertex(self, v: Vertex) -> None:
        if v not in self._adj:
            raise GraphError(f"unknown vertex {v!r}")

    def neighbors(self, v: Vertex) -> List[Tuple[Vertex, Distance, int]]:
        return self._adj[v]

    def degree(self, v: Vertex) -> int:
        return len(self._adj[v])

    def is_tree(self) -> bool:
        return len(self._edges) == len(self._order) - 1

    def distances_from(self, source: Vertex) -> Dict[Vertex, Distance]:
        """Single-source shortest-path distances (Dijkstra, binary heap)."""
        self.require_vertex(source)
        dist: Dict[Vertex, Distance] = {source: 0}
        done = set()
        pq: List[Tuple[Distance, Vertex]] = [(0, source)]
        while pq:
            d, u = heapq.heappop(pq)
            if u in done:
                continue
            done.add(u)
            for v, w, _ in self._adj[u]:
                nd = d + w
                if v not in dist or nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(pq, (nd, v))
        return dist

    def distance(self, u: Vertex, v: Vertex) -> Distance:
        self.require_vertex(u)
        self.require_vertex(v)
        if u == v:
            return 0
        return self.distances_from(u)[v]


def shortest_distance(g: Graph, u: Vertex, v: Vertex) -> Distance:
    return g.distance(u, v)


def all_pairs_from_sources(g: Graph, sources: Iterable[Vertex]) -> Dict[Tuple[Vertex, Vertex], Distance]:
    """Full table (source, vertex) -> distance for the given sources."""
    table: Dict[Tuple[Vertex, Vertex], Distance] = {}
    for s in sources:
        row = g.distances_from(s)
        for v, d in row.items():
            table[(s, v)] = d
    return table


def parse_graph(text: str, source: str = "<string>") -> Graph:
    """Parse the line-oriented graph format.

    ``v <id>`` declares a vertex, ``e <id> <id> <nonneg-int>`` an edge;
    ``#`` starts a comment.  Vertex ids are whitespace-free ASCII tokens.
    """
    vertices: List[Vertex] = []
    edges: List[Tuple[Vertex, Vertex, Distance]] = []
    declared = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "v":
            if len(parts) != 2:
                raise GraphError(f"{source}:{lineno}: expected 'v <id>'")
            vertices.append(parts[1])
            declared.add(parts[1])
        elif kind == "e":
            if len(parts) != 4:
                raise GraphError(f"{source}:{lineno}: expected 'e <id> <id> <length>'")
            u, v, ws = parts[1], parts[2], parts[3]
            if u not in declared or v not in declared:
                raise GraphError(f"{source}:{lineno}: edge references undeclared vertex")
            try:
                w = int(ws)
            except ValueError:
                raise GraphError(f"{source}:{lineno}: bad edge length {ws!r}") from None
            if w < 0:
                raise GraphError(f"{source}:{lineno}: negative edge length")
            edges.append((u, v, w))
        else:
            raise GraphError(f"{source}:{lineno}: unknown directive {kind!r}")
    try:
        return Graph(vertices, edges)
    except GraphError as exc:
        raise GraphError(f"{source}: {exc}") from None


def load_graph(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read(), source=str(path))
