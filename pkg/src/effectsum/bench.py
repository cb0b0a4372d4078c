"""Random instance generators and the operation-count bench harness.

Costs are measured with instrumentation counters (engine node visits, plus
entries touched by rebuilds for update amortization), never wall clock, so a
fixed seed reproduces the table byte for byte.  The report path writes the
table as CSV and can render the scaling figure to an image file next to it.
"""

from __future__ import annotations

import csv
import io
import math
import random
from typing import Dict, List, Optional, Tuple

from . import instrument
from .core import Graph, Vertex
from .decomp import (BranchDecomposition, TreeDecomposition,
                     from_branch_decomposition)
from .graphindex import GraphIndex
from .treeindex import TreeIndex


# ---------------------------------------------------------------------------
# generators

def random_tree(n: int, rng: random.Random, max_degree: int = 8,
                max_length: int = 20) -> Graph:
    """Random tree by preferential attachment under a degree cap."""
    verts = [f"n{i}" for i in range(n)]
    edges = []
    deg = [0] * n
    for i in range(1, n):
        cands = [j for j in range(i) if deg[j] < max_degree]
        p = rng.choice(cands)
        edges.append((verts[p], verts[i], rng.randint(0, max_length)))
        deg[p] += 1
        deg[i] += 1
    return Graph(verts, edges)


def random_partial_ktree(n: int, rng: random.Random, k: int = 2,
                         drop: float = 0.25,
                         max_length: int = 20) -> Tuple[Graph, TreeDecomposition]:
    """Random partial k-tree plus a width-k tree decomposition whose edge-bag
    unions stay at <= k+1 vertices (adjacent bags differ by at most one)."""
    if n < k:
        raise ValueError(f"need n >= {k}")
    verts = [f"g{i}" for i in range(n)]
    base = tuple(range(k))
    edges = {(a, b) for i, a in enumerate(base) for b in base[i + 1:]}
    bags: Dict[str, Tuple[str, ...]] = {"b0": tuple(verts[i] for i in base)}
    td_edges: List[Tuple[str, str]] = []
    cliques = [base]
    owner = {base: "b0"}  # k-clique -> decomposition node that introduced it
    for i in range(k, n):
        c = cliques[rng.randrange(len(cliques))]
        node = f"b{i}"
        bags[node] = (verts[i],) + tuple(verts[j] for j in c)
        td_edges.append((owner[c], node))
        for drop_j in c:
            nc = tuple(sorted(set(c) - {drop_j} | {i}))
            cliques.append(nc)
            owner[nc] = node
        for j in c:
            edges.add((min(i, j), max(i, j)))

    # drop edges while the graph stays connected (partial 2-tree)
    adj: Dict[int, set] = {i: set() for i in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    for a, b in sorted(edges):
        if len(edges) <= n - 1 or rng.random() >= drop:
            continue
        adj[a].discard(b)
        adj[b].discard(a)
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) == n:
            edges.discard((a, b))
        else:
            adj[a].add(b)
            adj[b].add(a)

    glist = [(verts[a], verts[b], rng.randint(0, max_length)) for a, b in sorted(edges)]
    g = Graph(verts, glist)
    td = _binarize_and_nicify(bags, td_edges)
    return g, td


def random_partial_2tree(n: int, rng: random.Random, drop: float = 0.25,
                         max_length: int = 20) -> Tuple[Graph, TreeDecomposition]:
    return random_partial_ktree(n, rng, k=2, drop=drop, max_length=max_length)


def _binarize_and_nicify(bags: Dict[str, Tuple[str, ...]],
                         td_edges: List[Tuple[str, str]]) -> TreeDecomposition:
    children: Dict[str, List[str]] = {b: [] for b in bags}
    parent: Dict[str, Optional[str]] = {b: None for b in bags}
    for a, b in td_edges:
        children[a].append(b)
        parent[b] = a

    # duplicate-bag chains keep every node at degree <= 3
    counter = 0
    queue = list(bags)
    while queue:
        node = queue.pop()
        limit = 3 if parent[node] is None else 2
        while len(children[node]) > limit:
            counter += 1
            dup = f"{node}x{counter}"
            bags[dup] = bags[node]
            moved = children[node][limit - 1:]
            children[node] = children[node][: limit - 1] + [dup]
            children[dup] = moved
            parent[dup] = node
            for c in moved:
                parent[c] = dup
            node = dup
            limit = 2

    # intersection nodes between bags whose union would exceed the width
    out_edges: List[Tuple[str, str]] = []
    counter = 0
    for a in list(bags):
        for b in children.get(a, []):
            union = set(bags[a]) | set(bags[b])
            if len(union) > max(len(bags[a]), len(bags[b])):
                counter += 1
                mid = f"m{counter}_{b}"
                inter = tuple(v for v in bags[a] if v in set(bags[b]))
                bags[mid] = inter
                out_edges.append((a, mid))
                out_edges.append((mid, b))
            else:
                out_edges.append((a, b))
    return TreeDecomposition(bags, out_edges)


def random_series_parallel(edge_target: int, rng: random.Random,
                           max_length: int = 20) -> Tuple[Graph, BranchDecomposition]:
    """Random series-parallel graph with its composition tree as a width-2
    branch decomposition (leaves are the graph edges)."""
    if edge_target < 1:
        raise ValueError("need at least one edge")
    find: Dict[str, str] = {}

    def root_of(x: str) -> str:
        while find.get(x, x) != x:
            find[x] = find.get(find[x], find[x])
            x = find[x]
        return x

    def union(x: str, y: str) -> None:
        find[root_of(y)] = root_of(x)

    comps = []
    nv = 0
    for i in range(edge_target):
        s, t = f"s{nv}", f"s{nv + 1}"
        nv += 2
        leaf = f"L{i}"
        comps.append({"bd": leaf, "s": s, "t": t, "direct": True, "edges": [(leaf, s, t)]})
    ncount = 0
    while len(comps) > 1:
        i = rng.randrange(len(comps))
        a = comps.pop(i)
        j = rng.randrange(len(comps))
        b = comps.pop(j)
        parallel = rng.random() < 0.45 and not (a["direct"] and b["direct"])
        if parallel:
            union(a["s"], b["s"])
            union(a["t"], b["t"])
            s, t = a["s"], a["t"]
            direct = a["direct"] or b["direct"]
        else:
            union(a["t"], b["s"])
            s, t = a["s"], b["t"]
            direct = False
        ncount += 1
        node = f"I{ncount}"
        comps.append({"bd": (node, a["bd"], b["bd"]), "s": s, "t": t,
                      "direct": direct, "edges": a["edges"] + b["edges"]})

    final = comps[0]
    nodes: List[str] = []
    bd_edges: List[Tuple[str, str]] = []

    def emit(t) -> str:
        if isinstance(t, str):
            nodes.append(t)
            return t
        node, l, r = t
        nodes.append(node)
        bd_edges.append((node, emit(l)))
        bd_edges.append((node, emit(r)))
        return node

    emit(final["bd"])
    vmap: Dict[str, str] = {}
    leaf_edges: Dict[str, Tuple[str, str]] = {}
    glist: List[Tuple[str, str, int]] = []
    for leaf, s, t in final["edges"]:
        u, v = root_of(s), root_of(t)
        for x in (u, v):
            if x not in vmap:
                vmap[x] = f"p{len(vmap)}"
        leaf_edges[leaf] = (vmap[u], vmap[v])
        glist.append((vmap[u], vmap[v], rng.randint(0, max_length)))
    g = Graph(sorted(vmap.values(), key=lambda s: int(s[1:])), glist)
    return g, BranchDecomposition(nodes, bd_edges, leaf_edges)


# ---------------------------------------------------------------------------
# workloads

def random_ops(rng: random.Random, vertices: List[Vertex], updates: int, queries: int,
               max_radius: int = 40, max_weight: int = 50,
               add_bias: float = 0.65) -> List[Tuple]:
    """A shuffled stream of add/remove and sum/top commands.

    Removes target random live facilities; the add bias keeps a meaningful
    population alive.  Deterministic for a fixed rng.
    """
    ops: List[Tuple] = []
    schedule = ["u"] * updates + ["q"] * queries
    rng.shuffle(schedule)
    live: List[Tuple[str, str]] = []
    fresh = 0
    for kind in schedule:
        if kind == "u":
            if live and rng.random() > add_bias:
                i = rng.randrange(len(live))
                fid, home = live.pop(i)
                ops.append(("remove", home, fid))
            else:
                fid = f"f{fresh}"
                fresh += 1
                home = vertices[rng.randrange(len(vertices))]
                ops.append(("add", home, fid, rng.randint(-max_weight, max_weight),
                            rng.randint(0, max_radius)))
                live.append((fid, home))
        else:
            v = vertices[rng.randrange(len(vertices))]
            d = rng.randint(0, max_radius // 2)
            if rng.random() < 0.5:
                ops.append(("sum", v, d))
            else:
                ops.append(("top", v, rng.randint(0, 5), d))
    return ops


# ---------------------------------------------------------------------------
# bench harness

def run_bench(engine: str, sizes: List[int], seed: int, queries: int = 64,
              strategy: str = "direct") -> List[Dict]:
    """Mean elementary-operation counts per op kind at every schedule size.

    Counts are engine node visits; update rows fold in entries touched by
    partial rebuilds so the amortized work is visible.
    """
    rows: List[Dict] = []
    for n in sizes:
        rng = random.Random(seed * 1_000_003 + n)
        if engine == "tree":
            g = random_tree(n, rng)
            index = TreeIndex(g)
        elif engine == "graph":
            g, bd = random_series_parallel(n, rng)
            dec = from_branch_decomposition(g, bd)
            index = GraphIndex(g, dec, strategy=strategy)
        else:
            raise ValueError(f"unknown bench engine {engine!r}")
        verts = g.vertices
        m = n

        with instrument.capture() as c:
            for i in range(m):
                index.add(verts[rng.randrange(len(verts))], f"f{i}",
                          rng.randint(-50, 50), rng.randint(0, 40))
        add_cost = (c.get("nodes", 0) + c.get("rebuild_entries", 0)) / m
        rows.append({"n": g.n, "m": m, "op": "add", "mean_count": add_cost})

        with instrument.capture() as c:
            for _ in range(queries):
                index.sum(verts[rng.randrange(len(verts))], rng.randint(0, 20))
        rows.append({"n": g.n, "m": m, "op": "sum",
                     "mean_count": c.get("nodes", 0) / queries})

        with instrument.capture() as c:
            for _ in range(queries):
                index.top(verts[rng.randrange(len(verts))], 4, rng.randint(0, 20))
        rows.append({"n": g.n, "m": m, "op": "top",
                     "mean_count": c.get("nodes", 0) / queries})
    return rows


def write_csv(rows: List[Dict], fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(["n", "m", "op", "mean_count"])
    for r in rows:
        writer.writerow([r["n"], r["m"], r["op"], f"{r['mean_count']:.3f}"])


def rows_to_csv(rows: List[Dict]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def render_plot(rows: List[Dict], path: str, engine: str) -> None:
    """Scaling figure: measured means per op plus the expected growth envelope."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ops = sorted({r["op"] for r in rows})
    for op in ops:
        pts = [(r["n"], r["mean_count"]) for r in rows if r["op"] == op]
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=op)
    sums = sorted((r["n"], r["m"], r["mean_count"]) for r in rows if r["op"] == "sum")
    if sums:
        n0, m0, c0 = sums[0]

        def envelope(n: float, m: float) -> float:
            if engine == "graph":
                return math.log2(n + 1) * math.log2(m + 1) ** 2
            return math.log2(n + 1) * math.log2(m + 1)

        scale = c0 / envelope(n0, m0)
        xs = [n for n, _, _ in sums]
        ax.plot(xs, [scale * envelope(n, m) for n, m, _ in sums],
                linestyle="--", color="gray", label="sum envelope")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("n")
    ax.set_ylabel("mean elementary operations")
    ax.set_title(f"{engine} engine operation counts")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
