"""Effect-region query index for trees.

Structure: a centroid decomposition of the degree-3 reduction.  Each leaf
keeps a home store of the facilities placed on its vertex; each non-root node
keeps an edge store for the decomposition edge above it.  A facility placed
on v with radius d lands in the home store as radius d, and in the opposite
side's edge store at every split along the root-to-leaf path, with radius
d - dist(far endpoint, v).  A query of radius d around v checks stores along
the same path with threshold dist(near endpoint, v) - d, which reports each
qualifying facility exactly once.

Single writer; sum/top are read-only and may run concurrently with each
other but not with add/remove.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

from .core import Facility, Graph, GraphError, INT_SUM, Semigroup
from .decomp import CentroidNode, CentroidTree, build_centroid_tree, reduce_to_degree3
from .rangekit import RangeSumPst, select_top


class TreeIndex:
    """Dynamic facility placement and effect queries on an edge-weighted tree."""

    def __init__(self, graph: Graph, semigroup: Semigroup = INT_SUM):
        if not graph.is_tree():
            raise GraphError("TreeIndex requires a tree")
        self.graph = graph
        self.semigroup = semigroup
        self.reduction = reduce_to_degree3(graph)
        self.ctree: CentroidTree = build_centroid_tree(self.reduction.graph, with_tables=True)
        self._facilities: Dict[str, Facility] = {}
        ordered = semigroup.ordered
        stack = [self.ctree.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                node.node_store = RangeSumPst(semigroup, ordered)
            else:
                stack.extend(node.children)
            if node.parent is not None:
                node.up_store = RangeSumPst(semigroup, ordered)

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
        rep = self.reduction.rep[v]
        node = self.ctree.root
        while not node.is_leaf:
            side, da, db = node.tables[rep]
            far = db if side == 0 else da
            node.children[1 - side].up_store.add(fid, radius - far, weight)
            node = node.children[side]
        node.node_store.add(fid, radius, weight)
        self._facilities[fid] = Facility(fid, weight, radius, v)

    def remove(self, v: str, fid: str) -> None:
        fac = self._facilities.get(fid)
        if fac is None:
            raise ValueError(f"facility {fid!r} is not placed")
        if fac.home != v:
            raise ValueError(f"facility {fid!r} is placed on {fac.home!r}, not {v!r}")
        rep = self.reduction.rep[v]
        node = self.ctree.root
        while not node.is_leaf:
            side, _, _ = node.tables[rep]
            node.children[1 - side].up_store.remove(fid)
            node = node.children[side]
        node.node_store.remove(fid)
        del self._facilities[fid]

    def sum(self, v: str, d: int = 0):
        """Total weight of facilities whose effect region intersects the
        radius-d circle around v; None when no facility qualifies.

        Partial sums merge in root-to-leaf path order, the home store last.
        """
        rep = self._query_rep(v, d)
        sg = self.semigroup
        out = None
        node = self.ctree.root
        while not node.is_leaf:
            side, da, db = node.tables[rep]
            near = da if side == 0 else db
            child = node.children[side]
            part = child.up_store.suffix_sum(near - d)
            if part is not None:
                out = part if out is None else sg.plus(out, part)
            node = child
        part = node.node_store.suffix_sum(-d)
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
        rep = self._query_rep(v, d)
        if k == 0:
            return []
        cands = []
        node = self.ctree.root
        while not node.is_leaf:
            side, da, db = node.tables[rep]
            near = da if side == 0 else db
            child = node.children[side]
            cands.extend(child.up_store.suffix_top_k(near - d, k))
            node = child
        cands.extend(node.node_store.suffix_top_k(-d, k))
        return [(e.fid, e.weight) for e in select_top(cands, k)]

    def _query_rep(self, v: str, d: int) -> str:
        self.graph.require_vertex(v)
        if d < 0:
            raise ValueError(f"negative query radius {d!r}")
        return self.reduction.rep[v]

    # -- introspection -------------------------------------------------------

    def explain(self, v: str, d: int = 0) -> List[dict]:
        """Reporting version of a query: one record per consulted store with
        its threshold and the matching (id, stored radius) pairs."""
        rep = self._query_rep(v, d)
        out = []
        node = self.ctree.root
        while not node.is_leaf:
            side, da, db = node.tables[rep]
            near = da if side == 0 else db
            child = node.children[side]
            q = near - d
            out.append({
                "kind": "edge",
                "store": _edge_label(node, child),
                "threshold": q,
                "matches": [(e.fid, e.coords[0]) for e in child.up_store.suffix_matches(q)],
            })
            node = child
        out.append({
            "kind": "home",
            "store": node.vertex,
            "threshold": -d,
            "matches": [(e.fid, e.coords[0]) for e in node.node_store.suffix_matches(-d)],
        })
        return out

    def placements(self, fid: str) -> List[Tuple[str, int]]:
        """Every store holding the facility, as (store label, stored radius)."""
        fac = self._facilities.get(fid)
        if fac is None:
            raise ValueError(f"facility {fid!r} is not placed")
        rep = self.reduction.rep[fac.home]
        out = []
        node = self.ctree.root
        while not node.is_leaf:
            side, _, _ = node.tables[rep]
            far_child = node.children[1 - side]
            entry = far_child.up_store.index.get(fid)
            out.append((_edge_label(node, far_child), entry.coords[0]))
            node = node.children[side]
        entry = node.node_store.index.get(fid)
        out.append((f"home[{node.vertex}]", entry.coords[0]))
        return out

    def total_stored_triples(self) -> int:
        total = 0
        stack = [self.ctree.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                total += len(node.node_store)
            else:
                stack.extend(node.children)
            if node.up_store is not None:
                total += len(node.up_store)
        return total

    def all_stores_empty(self) -> bool:
        return self.total_stored_triples() == 0


def _edge_label(parent: CentroidNode, child: CentroidNode) -> str:
    a, b, _ = parent.edge
    tail = child.vertex if child.is_leaf else f"{child.edge[0]}-{child.edge[1]}"
    return f"edge[({a},{b})->{tail}]"
