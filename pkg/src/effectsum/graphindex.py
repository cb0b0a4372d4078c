"""Effect-region query index for graphs with small separators.

Structure: a centroid decomposition T of the separator decomposition C.
Internal nodes of T are decomposition edges; each carries a node store, a
distance table over the vertices homed in its subtree, and each child an
edge store for the T-edge above it.  A facility on v with radius d is stored
along the root-to-home path as tuples (d - dist(v, v_1), ..., d - dist(v,
v_{t'})) over the bag of each visited node: in every node store, in the
off-path child's edge store before the home node, and in both child edge
stores at the home node.  Queries walk the same path, asking each store for
the entries with some coordinate j satisfying r_j >= dist(v, v_j) - d, which
reports each qualifying facility exactly once.

Single writer; sum/top are read-only and may run concurrently with each
other but not with add/remove.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

from .core import Facility, Graph, INT_SUM, Semigroup
from .decomp import (CentroidNode, CentroidTree, DecompositionError,
                     SeparatorDecomposition, build_centroid_tree,
                     validate_separator_decomposition)
from .multidim import MultiDimStore
from .rangekit import Entry, select_top

STRATEGIES = ("direct", "boxes")


class GraphIndex:
    """Dynamic facility placement and effect queries on a separable graph."""

    def __init__(self, graph: Graph, decomposition: SeparatorDecomposition,
                 semigroup: Semigroup = INT_SUM, strategy: str = "direct"):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        report = validate_separator_decomposition(graph, decomposition)
        if not report.ok:
            detail = "; ".join(report.errors[:4])
            raise DecompositionError(f"invalid separator decomposition: {detail}")
        self.graph = graph
        self.decomposition = decomposition
        self.semigroup = semigroup
        self.strategy = strategy
        self._facilities: Dict[str, Facility] = {}

        decomposition.fill_default_homes()
        cgraph = Graph(decomposition.nodes, [(a, b, 1) for a, b, _ in decomposition.edges])
        self.ctree: CentroidTree = build_centroid_tree(cgraph, with_tables=False)

        ordered = semigroup.ordered
        by_edge: Dict[int, CentroidNode] = {}
        stack = [self.ctree.root]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                eid = node.edge[2]
                node.bag = decomposition.edges[eid][2]
                node.node_store = MultiDimStore(len(node.bag), semigroup, ordered,
                                                track_ids=True)
                node.dist_table = {}
                by_edge[eid] = node
                stack.extend(node.children)
            if node.parent is not None:
                node.up_store = MultiDimStore(len(node.parent.bag), semigroup, ordered,
                                              track_ids=True)
        self._by_edge = by_edge

        # one Dijkstra per distinct bag vertex, then per-node distance tables
        rows: Dict[str, Dict[str, int]] = {}
        for _, _, bag in decomposition.edges:
            for b in bag:
                if b not in rows:
                    rows[b] = graph.distances_from(b)

        self._paths: Dict[str, List[CentroidNode]] = {}
        for v in graph.vertices:
            home = by_edge[decomposition.home[v]]
            path: List[CentroidNode] = []
            node = home
            while node is not None:
                path.append(node)
                node = node.parent
            path.reverse()
            self._paths[v] = path
            for e in path:
                e.dist_table[v] = tuple(rows[b][v] for b in e.bag)

    # -- operations ----------------------------------------------------------

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
        path = self._paths[v]
        last = len(path) - 1
        for i, e in enumerate(path):
            coords = tuple(radius - x for x in e.dist_table[v])
            e.node_store.insert(Entry(coords, fid, weight))
            if i == last:
                for child in e.children:
                    child.up_store.insert(Entry(coords, fid, weight))
            else:
                nxt = path[i + 1]
                off = e.children[1] if e.children[0] is nxt else e.children[0]
                off.up_store.insert(Entry(coords, fid, weight))
        self._facilities[fid] = Facility(fid, weight, radius, v)

    def remove(self, v: str, fid: str) -> None:
        fac = self._facilities.get(fid)
        if fac is None:
            raise ValueError(f"facility {fid!r} is not placed")
        if fac.home != v:
            raise ValueError(f"facility {fid!r} is placed on {fac.home!r}, not {v!r}")
        path = self._paths[v]
        last = len(path) - 1
        for i, e in enumerate(path):
            e.node_store.remove(fid)
            if i == last:
                for child in e.children:
                    child.up_store.remove(fid)
            else:
                nxt = path[i + 1]
                off = e.children[1] if e.children[0] is nxt else e.children[0]
                off.up_store.remove(fid)
        del self._facilities[fid]

    def _query_stores(self, v: str, d: int):
        """The (store, corner) pairs a query of radius d around v consults."""
        self.graph.require_vertex(v)
        if d < 0:
            raise ValueError(f"negative query radius {d!r}")
        path = self._paths[v]
        last = len(path) - 1
        for i, e in enumerate(path):
            corner = tuple(x - d for x in e.dist_table[v])
            if i == last:
                yield e.node_store, corner, e, None
            else:
                yield path[i + 1].up_store, corner, e, path[i + 1]

    def sum(self, v: str, d: int = 0):
        """Total weight of facilities whose effect region intersects the
        radius-d circle around v; None when no facility qualifies."""
        sg = self.semigroup
        boxes = self.strategy == "boxes"
        out = None
        for store, corner, _, _ in self._query_stores(v, d):
            part = store.complement_sum_boxes(corner) if boxes else store.complement_sum(corner)
            if part is not None:
                out = part if out is None else sg.plus(out, part)
        return out

    def top(self, v: str, k: int, d: int = 0) -> List[Tuple[str, object]]:
        """The k heaviest qualifying facilities as (id, weight), heaviest
        first; equal weights rank by smaller id."""
        if not self.semigroup.ordered:
            raise ValueError(f"semigroup {self.semigroup.name!r} is not ordered")
        if k < 0:
            raise ValueError("k must be >= 0")
        boxes = self.strategy == "boxes"
        cands: List[Entry] = []
        for store, corner, _, _ in self._query_stores(v, d):
            if boxes:
                for b in store._complement_boxes(corner):
                    cands.extend(store._ival_candidates(b, k))
            else:
                cands.extend(store._complement_candidates(corner, k))
        return [(e.fid, e.weight) for e in select_top(cands, k)]

    # -- introspection -------------------------------------------------------

    def explain(self, v: str, d: int = 0) -> List[dict]:
        """Reporting version of a query: one record per consulted store with
        its corner and the matching (id, coordinate tuple) pairs."""
        out = []
        for store, corner, e, child in self._query_stores(v, d):
            if child is None:
                kind, label = "node", _store_label(e, store)
            else:
                kind, label = "edge", _store_label_edge(e, child)
            out.append({
                "kind": kind,
                "store": label,
                "corner": corner,
                "matches": [(x.fid, x.coords) for x in store.complement_matches(corner)],
            })
        return out

    def placements(self, fid: str) -> List[Tuple[str, Tuple[int, ...]]]:
        """Every store holding the facility, as (store label, coordinates)."""
        fac = self._facilities.get(fid)
        if fac is None:
            raise ValueError(f"facility {fid!r} is not placed")
        path = self._paths[fac.home]
        last = len(path) - 1
        out = []
        for i, e in enumerate(path):
            entry = e.node_store.index.get(fid)
            out.append((_store_label(e, e.node_store), entry.coords))
            if i == last:
                kids = list(e.children)
            else:
                nxt = path[i + 1]
                kids = [e.children[1] if e.children[0] is nxt else e.children[0]]
            for child in kids:
                entry = child.up_store.index.get(fid)
                out.append((_store_label_edge(e, child), entry.coords))
        return out

    def home_edge_index(self, v: str) -> int:
        return self.decomposition.home[v]

    def total_stored_tuples(self) -> int:
        total = 0
        stack = [self.ctree.root]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                total += len(node.node_store)
                stack.extend(node.children)
            if node.up_store is not None:
                total += len(node.up_store)
        return total

    def all_stores_empty(self) -> bool:
        return self.total_stored_tuples() == 0

    def distance_table_entries(self) -> int:
        total = 0
        for node in self.ctree.internal_nodes():
            total += len(node.dist_table) * len(node.bag)
        return total


def _store_label(node: CentroidNode, store) -> str:
    eid = node.edge[2]
    if store is node.node_store:
        return f"node[e{eid}]"
    return f"edge[->e{eid}]"


def _store_label_edge(parent: CentroidNode, child: CentroidNode) -> str:
    tail = child.vertex if child.is_leaf else f"e{child.edge[2]}"
    return f"edge[e{parent.edge[2]}->{tail}]"
