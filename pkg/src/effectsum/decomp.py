"""Decomposition machinery.

Degree-3 reduction of trees, centroid decompositions of degree-<=3 trees,
separator decompositions with a brute-force validator, and conversions from
tree decompositions and branch decompositions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .core import Graph, GraphError, Vertex


class DecompositionError(GraphError):
    """Invalid decomposition input."""


# ---------------------------------------------------------------------------
# degree-3 reduction

@dataclass
class Degree3Tree:
    """A tree whose vertices all have degree <= 3, distance-equivalent to the
    original: every high-degree vertex became a caterpillar of gadget nodes
    joined by zero-length edges.  ``rep`` maps original vertices to their
    representatives (the chain head, which keeps the original id)."""

    graph: Graph
    rep: Dict[Vertex, Vertex]
    gadgets: Dict[Vertex, List[Vertex]]


def reduce_to_degree3(g: Graph) -> Degree3Tree:
    if not g.is_tree():
        raise DecompositionError("input graph is not a tree")
    if all(g.degree(v) <= 3 for v in g.vertices):
        rep = {v: v for v in g.vertices}
        return Degree3Tree(g, rep, {})

    taken = set(g.vertices)

    def fresh(base: Vertex) -> Vertex:
        cand = base + "'"
        while cand in taken:
            cand += "'"
        taken.add(cand)
        return cand

    # per-edge endpoint substitution, filled in vertex declaration order
    edges = [[u, v, w] for u, v, w in g.edges]
    incident: Dict[Vertex, List[int]] = {v: [] for v in g.vertices}
    for eid, (u, v, _) in enumerate(g.edges):
        incident[u].append(eid)
        incident[v].append(eid)

    order: List[Vertex] = []
    gadgets: Dict[Vertex, List[Vertex]] = {}
    zero_edges: List[Tuple[Vertex, Vertex, int]] = []
    for v in g.vertices:
        order.append(v)
        deg = len(incident[v])
        if deg <= 3:
            continue
        chain = [v]
        for _ in range(deg - 3):
            node = fresh(v)
            chain.append(node)
            order.append(node)
        gadgets[v] = chain
        for a, b in zip(chain, chain[1:]):
            zero_edges.append((a, b, 0))
        # chain head keeps the first two incident edges, the tail the last
        # two, middle nodes one each
        owners = [v, v] + [chain[i] for i in range(1, len(chain) - 1)] + [chain[-1], chain[-1]]
        for eid, owner in zip(incident[v], owners):
            if edges[eid][0] == v:
                edges[eid][0] = owner
            else:
                edges[eid][1] = owner

    all_edges = [tuple(e) for e in edges] + zero_edges
    reduced = Graph(order, all_edges)
    rep = {v: v for v in g.vertices}
    return Degree3Tree(reduced, rep, gadgets)


# ---------------------------------------------------------------------------
# centroid decomposition

class CentroidNode:
    """A node of the centroid decomposition.

    Internal nodes carry the removed tree edge ``(a, b, eid)`` and two
    children (index 0 holds the a-side).  Leaves carry the vertex.  When the
    tree is built with tables, each internal node maps every vertex of its
    component to ``(side, dist_to_a, dist_to_b)``.

    The ``bag``, ``node_store``, ``up_store`` and ``dist_table`` slots stay
    None here; the query indexes fill them in.
    """

    __slots__ = ("edge", "vertex", "children", "parent", "comp_size", "depth",
                 "tables", "bag", "node_store", "up_store", "dist_table")

    def __init__(self):
        self.edge: Optional[Tuple[Vertex, Vertex, int]] = None
        self.vertex: Optional[Vertex] = None
        self.children: List["CentroidNode"] = []
        self.parent: Optional["CentroidNode"] = None
        self.comp_size = 1
        self.depth = 0
        self.tables: Optional[Dict[Vertex, Tuple[int, int, int]]] = None
        self.bag = None
        self.node_store = None
        self.up_store = None
        self.dist_table = None

    @property
    def is_leaf(self) -> bool:
        return self.edge is None

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if self.is_leaf:
            return f"CentroidLeaf({self.vertex!r})"
        return f"CentroidNode({self.edge[0]!r},{self.edge[1]!r})"


class CentroidTree:
    """Binary decomposition tree: leaves are vertices, internal nodes edges."""

    def __init__(self, root: CentroidNode, leaf_map: Dict[Vertex, CentroidNode]):
        self.root = root
        self.leaf_map = leaf_map

    def height(self) -> int:
        """Maximum leaf depth, in edges."""
        return max(leaf.depth for leaf in self.leaf_map.values())

    def internal_nodes(self) -> List[CentroidNode]:
        out = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            if not v.is_leaf:
                out.append(v)
                stack.extend(v.children)
        return out

    def path_to_leaf(self, v: Vertex) -> List[CentroidNode]:
        node = self.leaf_map[v]
        path = [node]
        while node.parent is not None:
            node = node.parent
            path.append(node)
        path.reverse()
        return path


def build_centroid_tree(g: Graph, with_tables: bool = False) -> CentroidTree:
    """Recursively split a degree-<=3 tree at deterministic centroid edges.

    Centroid choice: among edges minimizing the larger side, the smallest
    edge id wins.  Every split leaves parts of at most ceil(2n/3) vertices.
    """
    for v in g.vertices:
        if g.degree(v) > 3:
            raise DecompositionError(f"vertex {v!r} has degree {g.degree(v)} > 3")
    if not g.is_tree():
        raise DecompositionError("input graph is not a tree")

    adj = {v: g.neighbors(v) for v in g.vertices}
    leaf_map: Dict[Vertex, CentroidNode] = {}

    def build(comp: List[Vertex], depth: int) -> CentroidNode:
        node = CentroidNode()
        node.depth = depth
        node.comp_size = len(comp)
        if len(comp) == 1:
            node.vertex = comp[0]
            leaf_map[comp[0]] = node
            return node

        members = set(comp)
        n = len(comp)
        # subtree sizes from comp[0]; every non-root vertex owns its parent edge
        root = comp[0]
        parent: Dict[Vertex, Tuple[Vertex, int]] = {root: (root, -1)}
        order: List[Vertex] = [root]
        stack = [root]
        while stack:
            u = stack.pop()
            for w, _, eid in adj[u]:
                if w in members and w not in parent:
                    parent[w] = (u, eid)
                    order.append(w)
                    stack.append(w)
        size = {v: 1 for v in comp}
        for u in reversed(order):
            if u != root:
                size[parent[u][0]] += size[u]

        best = None
        for u in order:
            if u == root:
                continue
            s = size[u]
            cand = (max(s, n - s), parent[u][1], u)
            if best is None or cand < best:
                best = cand
        _, eid, child_v = best
        child_p = parent[child_v][0]
        eu, ev, ew = g.edges[eid]

        # partition, preserving comp order for determinism
        below: Set[Vertex] = set()
        stack = [child_v]
        below.add(child_v)
        while stack:
            u = stack.pop()
            for w, _, eid2 in adj[u]:
                if w in members and w not in below and not (eid2 == eid and u == child_v and w == child_p):
                    below.add(w)
                    stack.append(w)
        side_u = below if eu == child_v else members - below
        comp_u = [x for x in comp if x in side_u]
        comp_v = [x for x in comp if x not in side_u]

        node.edge = (eu, ev, eid)
        if with_tables:
            du = _tree_distances(adj, members, eu)
            dv = _tree_distances(adj, members, ev)
            node.tables = {x: ((0 if x in side_u else 1), du[x], dv[x]) for x in comp}
        c0 = build(comp_u, depth + 1)
        c1 = build(comp_v, depth + 1)
        c0.parent = node
        c1.parent = node
        node.children = [c0, c1]
        return node

    root = build(g.vertices, 0)
    return CentroidTree(root, leaf_map)


def _tree_distances(adj, members: Set[Vertex], source: Vertex) -> Dict[Vertex, int]:
    dist = {source: 0}
    stack = [source]
    while stack:
        u = stack.pop()
        for w, length, _ in adj[u]:
            if w in members and w not in dist:
                dist[w] = dist[u] + length
                stack.append(w)
    return dist


def check_centroid_bounds(tree: CentroidTree) -> None:
    """Hard structural assertions: split sizes and height."""
    import math

    for node in tree.internal_nodes():
        n = node.comp_size
        limit = -(-2 * n // 3)  # ceil(2n/3)
        for c in node.children:
            assert c.comp_size <= limit, (
                f"split {c.comp_size}/{n} exceeds ceil(2n/3)={limit}"
            )
    n = tree.root.comp_size
    if n > 1:
        assert tree.height() <= math.log(n, 1.5) + 1e-9, (
            f"height {tree.height()} exceeds log_1.5({n})"
        )


# ---------------------------------------------------------------------------
# separator decompositions

@dataclass
class ValidationReport:
    ok: bool
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    t: int = 0

    def __bool__(self) -> bool:  # pragma: no cover - convenience
        return self.ok


@dataclass
class SeparatorDecomposition:
    """Unrooted degree-<=3 tree whose edge bags separate the graph.

    ``edges[i] = (c1, c2, bag)`` with the bag an ordered vertex tuple; the
    bag order fixes the coordinate order of the stored radius tuples.
    ``home`` maps each graph vertex to the index of a bag edge containing it.
    """

    nodes: List[str]
    edges: List[Tuple[str, str, Tuple[Vertex, ...]]]
    home: Dict[Vertex, int] = field(default_factory=dict)

    @property
    def t(self) -> int:
        return max((len(bag) for _, _, bag in self.edges), default=0)

    def fill_default_homes(self) -> None:
        """Missing homes default to the first declared edge whose bag has the
        vertex."""
        for idx, (_, _, bag) in enumerate(self.edges):
            for v in bag:
                if v not in self.home:
                    self.home[v] = idx

    def adjacency(self) -> Dict[str, List[Tuple[str, int]]]:
        adj: Dict[str, List[Tuple[str, int]]] = {c: [] for c in self.nodes}
        for idx, (a, b, _) in enumerate(self.edges):
            adj[a].append((b, idx))
            adj[b].append((a, idx))
        return adj


def validate_separator_decomposition(g: Graph, dec: SeparatorDecomposition,
                                     t: Optional[int] = None) -> ValidationReport:
    """Check every decomposition invariant; violations are reported, not raised.

    The separator property is checked per edge by connectivity search in G
    with the bag removed (brute force, run once at load time).
    """
    report = ValidationReport(ok=True)

    def err(msg: str) -> None:
        report.ok = False
        report.errors.append(msg)

    names = set()
    for c in dec.nodes:
        if c in names:
            err(f"duplicate decomposition node {c!r}")
        names.add(c)

    for idx, (a, b, bag) in enumerate(dec.edges):
        if a not in names or b not in names:
            err(f"edge {idx} references unknown node")
        if a == b:
            err(f"edge {idx} is a self-loop")
        for v in bag:
            if not g.has_vertex(v):
                err(f"edge {idx} bag contains unknown vertex {v!r}")
        if len(set(bag)) != len(bag):
            err(f"edge {idx} bag repeats a vertex")
        if t is not None and len(bag) > t:
            err(f"edge {idx} bag size {len(bag)} exceeds t={t}")
    report.t = dec.t
    if report.errors:
        return report

    # the decomposition tree itself: connected, acyclic, degree <= 3
    adj = dec.adjacency()
    if len(dec.edges) != len(dec.nodes) - 1:
        err("decomposition is not a tree (edge count)")
    else:
        seen = {dec.nodes[0]}
        stack = [dec.nodes[0]]
        while stack:
            u = stack.pop()
            for w, _ in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(dec.nodes):
            err("decomposition is not connected")
    for c in dec.nodes:
        if len(adj[c]) > 3:
            err(f"decomposition node {c!r} has degree {len(adj[c])} > 3")
    if report.errors:
        return report

    covered = set()
    for _, _, bag in dec.edges:
        covered.update(bag)
    for v in g.vertices:
        if v not in covered:
            err(f"vertex {v!r} appears in no bag")

    for v, idx in dec.home.items():
        if not 0 <= idx < len(dec.edges):
            err(f"home of {v!r} is not a valid edge index")
        elif v not in dec.edges[idx][2]:
            err(f"home edge {idx} bag does not contain {v!r}")

    # separator property, per edge
    for idx in range(len(dec.edges)):
        a, b, bag = dec.edges[idx]
        sides = _split_sides(dec, adj, idx)
        v1 = set().union(*(set(dec.edges[j][2]) for j in sides[0])) if sides[0] else set()
        v2 = set().union(*(set(dec.edges[j][2]) for j in sides[1])) if sides[1] else set()
        blocked = set(bag)
        start = v1 - blocked
        goal = v2 - blocked
        if not start or not goal:
            continue
        seen = set(start)
        stack = list(start)
        while stack:
            u = stack.pop()
            for w, _, _ in g.neighbors(u):
                if w not in blocked and w not in seen:
                    seen.add(w)
                    stack.append(w)
        crossing = seen & goal
        if crossing:
            err(f"edge {idx} bag {bag!r} fails to separate (reaches {sorted(crossing)[0]!r})")

    if len(dec.nodes) > 4 * g.n:
        report.warnings.append(
            f"decomposition has {len(dec.nodes)} nodes for {g.n} vertices (> 4n)"
        )
    return report


def _split_sides(dec: SeparatorDecomposition, adj, edge_idx: int) -> Tuple[List[int], List[int]]:
    """Edge indices on each side of a removed decomposition edge."""
    a, b, _ = dec.edges[edge_idx]
    side_a_nodes = {a}
    stack = [a]
    while stack:
        u = stack.pop()
        for w, j in adj[u]:
            if j != edge_idx and w not in side_a_nodes:
                side_a_nodes.add(w)
                stack.append(w)
    side_a, side_b = [], []
    for j, (x, y, _) in enumerate(dec.edges):
        if j == edge_idx:
            continue
        if x in side_a_nodes:
            side_a.append(j)
        else:
            side_b.append(j)
    return side_a, side_b


def parse_decomposition(text: str, source: str = "<string>") -> SeparatorDecomposition:
    """Line format: ``cnode <id>``; ``cedge <id> <id> <v,v,...>`` (bag may be
    omitted or ``-`` for empty); ``home <vertex> <cedge-index>``."""
    nodes: List[str] = []
    edges: List[Tuple[str, str, Tuple[str, ...]]] = []
    home: Dict[str, int] = {}
    declared = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "cnode":
            if len(parts) != 2:
                raise DecompositionError(f"{source}:{lineno}: expected 'cnode <id>'")
            if parts[1] in declared:
                raise DecompositionError(f"{source}:{lineno}: duplicate cnode {parts[1]!r}")
            declared.add(parts[1])
            nodes.append(parts[1])
        elif kind == "cedge":
            if len(parts) not in (3, 4):
                raise DecompositionError(
                    f"{source}:{lineno}: expected 'cedge <id> <id> [<bag>]'")
            a, b = parts[1], parts[2]
            if a not in declared or b not in declared:
                raise DecompositionError(f"{source}:{lineno}: cedge references undeclared cnode")
            bag: Tuple[str, ...] = ()
            if len(parts) == 4 and parts[3] != "-":
                bag = tuple(parts[3].split(","))
            edges.append((a, b, bag))
        elif kind == "home":
            if len(parts) != 3:
                raise DecompositionError(f"{source}:{lineno}: expected 'home <vertex> <cedge-index>'")
            try:
                home[parts[1]] = int(parts[2])
            except ValueError:
                raise DecompositionError(f"{source}:{lineno}: bad edge index {parts[2]!r}") from None
        else:
            raise DecompositionError(f"{source}:{lineno}: unknown directive {kind!r}")
    return SeparatorDecomposition(nodes, edges, home)


def load_decomposition(path) -> SeparatorDecomposition:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_decomposition(fh.read(), source=str(path))


# ---------------------------------------------------------------------------
# conversions

@dataclass
class TreeDecomposition:
    """Node-bagged tree decomposition (bags keyed by node id)."""

    bags: Dict[str, Tuple[Vertex, ...]]
    edges: List[Tuple[str, str]]


@dataclass
class BranchDecomposition:
    """Unrooted tree whose leaves map bijectively to graph edges."""

    nodes: List[str]
    edges: List[Tuple[str, str]]
    leaf_edges: Dict[str, Tuple[Vertex, Vertex]]


def _validate_tree_shape(nodes: Sequence[str], edges: Sequence[Tuple[str, str]],
                         what: str) -> Dict[str, List[str]]:
    adj: Dict[str, List[str]] = {c: [] for c in nodes}
    for a, b in edges:
        if a not in adj or b not in adj:
            raise DecompositionError(f"{what}: edge ({a!r}, {b!r}) references unknown node")
        adj[a].append(b)
        adj[b].append(a)
    if len(edges) != len(nodes) - 1:
        raise DecompositionError(f"{what}: not a tree")
    if nodes:
        seen = {nodes[0]}
        stack = [nodes[0]]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(nodes):
            raise DecompositionError(f"{what}: not connected")
    return adj


def from_nice_tree_decomposition(g: Graph, td: TreeDecomposition) -> SeparatorDecomposition:
    """Edge bags become the union of the two endpoint node bags.

    The input must be a valid tree decomposition with node degree <= 3.  For
    decompositions whose adjacent bags differ by at most one vertex the
    resulting width equals the original bag size bound.
    """
    nodes = list(td.bags)
    adj = _validate_tree_shape(nodes, td.edges, "tree decomposition")
    for c in nodes:
        if len(adj[c]) > 3:
            raise DecompositionError(f"tree decomposition node {c!r} has degree > 3")

    covered = set()
    for bag in td.bags.values():
        covered.update(bag)
    for v in g.vertices:
        if v not in covered:
            raise DecompositionError(f"vertex {v!r} missing from every bag")
    for u, v, _ in g.edges:
        if not any(u in bag and v in bag for bag in td.bags.values()):
            raise DecompositionError(f"edge ({u!r}, {v!r}) not inside any bag")
    for v in g.vertices:
        holders = [c for c in nodes if v in td.bags[c]]
        if not _occurrences_connected(adj, holders):
            raise DecompositionError(f"bags containing {v!r} are not connected")

    if len(nodes) == 1:
        only = nodes[0]
        bag = tuple(td.bags[only])
        dec = SeparatorDecomposition([only, only + "*"], [(only, only + "*", bag)])
    else:
        edges = []
        for a, b in td.edges:
            union = list(td.bags[a])
            for v in td.bags[b]:
                if v not in union:
                    union.append(v)
            edges.append((a, b, tuple(union)))
        dec = SeparatorDecomposition(nodes, edges)
    dec.fill_default_homes()
    return dec


def _occurrences_connected(adj, holders: List[str]) -> bool:
    if not holders:
        return True
    hs = set(holders)
    seen = {holders[0]}
    stack = [holders[0]]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w in hs and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(hs)


def from_branch_decomposition(g: Graph, bd: BranchDecomposition) -> SeparatorDecomposition:
    """Edge bags become middle sets (vertices with incident graph edges on
    both sides).  Degree-1 graph vertices join the bag of their edge's leaf
    side, which keeps every vertex covered (bag sizes then reach max(b, 2)).
    """
    adj = _validate_tree_shape(bd.nodes, bd.edges, "branch decomposition")
    for c in bd.nodes:
        if len(adj[c]) > 3:
            raise DecompositionError(f"branch decomposition node {c!r} has degree > 3")

    def norm(u: Vertex, v: Vertex) -> Tuple[Vertex, Vertex]:
        return (u, v) if u <= v else (v, u)

    graph_edges = {norm(u, v) for u, v, _ in g.edges}
    mapped: Dict[Tuple[str, str], str] = {}
    for leaf, (u, v) in bd.leaf_edges.items():
        if leaf not in adj:
            raise DecompositionError(f"leaf {leaf!r} is not a decomposition node")
        if len(adj[leaf]) > 1:
            raise DecompositionError(f"mapped node {leaf!r} is not a leaf")
        key = norm(u, v)
        if key not in graph_edges:
            raise DecompositionError(f"leaf {leaf!r} maps to a non-edge ({u!r}, {v!r})")
        if key in mapped.values():
            raise DecompositionError(f"edge ({u!r}, {v!r}) mapped to two leaves")
        mapped[key] = leaf
    leaves = [c for c in bd.nodes if len(adj[c]) <= 1]
    if set(bd.leaf_edges) != set(leaves) or len(mapped) != len(graph_edges):
        raise DecompositionError("leaf map is not a bijection with the graph edges")

    if len(bd.nodes) == 1:
        only = bd.nodes[0]
        u, v = bd.leaf_edges[only]
        dec = SeparatorDecomposition([only, only + "*"], [(only, only + "*", (u, v))])
        dec.fill_default_homes()
        return dec

    incident: Dict[Vertex, Set[str]] = {}
    for key, leaf in mapped.items():
        for v in key:
            incident.setdefault(v, set()).add(leaf)

    # leaves on the first side of every decomposition edge
    cedges: List[Tuple[str, str, Tuple[Vertex, ...]]] = []
    edge_ids = {e: i for i, e in enumerate(bd.edges)}
    for a, b in bd.edges:
        side = {a}
        stack = [a]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in side and not ((u, w) == (a, b) or (w, u) == (a, b)):
                    side.add(w)
                    stack.append(w)
        bag = [v for v in g.vertices
               if incident.get(v) and any(l in side for l in incident[v])
               and any(l not in side for l in incident[v])]
        cedges.append((a, b, tuple(bag)))

    dec = SeparatorDecomposition(list(bd.nodes), cedges)

    # degree-1 vertices sit on one side of everything; adopt them into the
    # bag next to their only edge's leaf
    for v in g.vertices:
        if g.degree(v) == 1:
            leaf = mapped[norm(v, g.neighbors(v)[0][0])]
            for idx, (a, b, bag) in enumerate(dec.edges):
                if (a == leaf or b == leaf) and v not in bag:
                    dec.edges[idx] = (a, b, bag + (v,))
                    break
    dec.fill_default_homes()
    return dec


def tree_to_separator_decomposition(g: Graph) -> SeparatorDecomposition:
    """A tree's natural 1-separator decomposition.

    Built on the degree-3 reduction: each reduced edge is subdivided, and the
    two halves carry the original vertex behind their endpoint as a
    singleton bag.
    """
    red = reduce_to_degree3(g)
    gp = red.graph
    back: Dict[Vertex, Vertex] = {}
    for original, chain in red.gadgets.items():
        for c in chain:
            back[c] = original

    def owner(x: Vertex) -> Vertex:
        return back.get(x, x)

    nodes = list(gp.vertices)
    edges: List[Tuple[str, str, Tuple[Vertex, ...]]] = []
    mids = []
    for eid, (u, v, _) in enumerate(gp.edges):
        mid = f"@{eid}"
        mids.append(mid)
        edges.append((u, mid, (owner(u),)))
        edges.append((mid, v, (owner(v),)))
    dec = SeparatorDecomposition(nodes + mids, edges)
    dec.fill_default_homes()
    return dec
