import random

import pytest

from effectsum import (Graph, GraphError, INT_MAX, INT_MIN, INT_SUM, STR_CONCAT,
                       all_pairs_from_sources, parse_graph, shortest_distance)


def bellman_ford(g: Graph, source: str) -> dict:
    dist = {v: None for v in g.vertices}
    dist[source] = 0
    for _ in range(g.n):
        changed = False
        for u, v, w in g.edges:
            for a, b in ((u, v), (v, u)):
                if dist[a] is not None and (dist[b] is None or dist[a] + w < dist[b]):
                    dist[b] = dist[a] + w
                    changed = True
        if not changed:
            break
    return dist


def random_connected_graph(n: int, rng: random.Random) -> Graph:
    verts = [f"v{i}" for i in range(n)]
    edges = [(verts[rng.randrange(i)], verts[i], rng.randint(0, 9)) for i in range(1, n)]
    extra = rng.randrange(2 * n)
    for _ in range(extra):
        a, b = rng.sample(range(n), 2)
        edges.append((verts[a], verts[b], rng.randint(0, 9)))
    return Graph(verts, edges)


class TestGraphConstruction:
    def test_path_distance(self):
        g = Graph(["a", "b", "c"], [("a", "b", 2), ("b", "c", 3)])
        assert shortest_distance(g, "a", "c") == 5

    def test_self_distance_zero(self):
        g = Graph(["a", "b"], [("a", "b", 7)])
        for v in g.vertices:
            assert shortest_distance(g, v, v) == 0

    def test_unknown_vertex(self):
        g = Graph(["a", "b"], [("a", "b", 1)])
        with pytest.raises(GraphError):
            shortest_distance(g, "a", "zz")

    def test_rejects_disconnected(self):
        with pytest.raises(GraphError, match="disconnected"):
            Graph(["a", "b", "c"], [("a", "b", 1)])

    def test_rejects_self_loop(self):
        with pytest.raises(GraphError, match="self-loop"):
            Graph(["a", "b"], [("a", "a", 1), ("a", "b", 1)])

    def test_rejects_negative_length(self):
        with pytest.raises(GraphError):
            Graph(["a", "b"], [("a", "b", -1)])

    def test_parallel_edges_collapse_to_min(self):
        g = Graph(["a", "b"], [("a", "b", 5), ("b", "a", 2), ("a", "b", 9)])
        assert len(g.edges) == 1
        assert g.distance("a", "b") == 2

    def test_fig_tree_distance(self, fig_tree):
        # radius-8 effect region on v11 overlaps a radius-8 query around v6:
        # 1 + 5 + 7 + 2 = 15 <= 16
        assert shortest_distance(fig_tree, "v11", "v6") == 15

    def test_fig_graph_distance(self, fig_graph):
        # three unit edges v6-v5-v7-v1 of the length-5 red path
        assert shortest_distance(fig_graph, "v6", "v1") == 3


class TestAllPairs:
    def test_single_source_path(self):
        g = Graph(["a", "b", "c"], [("a", "b", 2), ("b", "c", 3)])
        assert all_pairs_from_sources(g, ["a"]) == {
            ("a", "a"): 0, ("a", "b"): 2, ("a", "c"): 5}

    def test_empty_sources(self):
        g = Graph(["a", "b"], [("a", "b", 1)])
        assert all_pairs_from_sources(g, []) == {}

    def test_matches_bellman_ford_on_random_graphs(self):
        rng = random.Random(11)
        for _ in range(25):
            g = random_connected_graph(rng.randint(2, 50), rng)
            table = all_pairs_from_sources(g, g.vertices)
            for s in g.vertices:
                bf = bellman_ford(g, s)
                for v in g.vertices:
                    assert table[(s, v)] == bf[v]

    def test_triangle_inequality(self):
        rng = random.Random(12)
        for _ in range(10):
            g = random_connected_graph(rng.randint(3, 40), rng)
            table = all_pairs_from_sources(g, g.vertices)
            for _ in range(60):
                u, v, w = (rng.choice(g.vertices) for _ in range(3))
                assert table[(u, w)] <= table[(u, v)] + table[(v, w)]
                assert table[(u, v)] == table[(v, u)]


class TestSemigroups:
    @pytest.mark.parametrize("sg,universe", [
        (INT_SUM, range(-50, 50)),
        (INT_MIN, range(-50, 50)),
        (INT_MAX, range(-50, 50)),
        (STR_CONCAT, ["", "a", "bc", "ddd"]),
    ])
    def test_associativity(self, sg, universe):
        rng = random.Random(13)
        pool = list(universe)
        for _ in range(200):
            x, y, z = (rng.choice(pool) for _ in range(3))
            assert sg.plus(x, sg.plus(y, z)) == sg.plus(sg.plus(x, y), z)

    def test_order_flags(self):
        assert INT_SUM.ordered
        assert not INT_MIN.ordered
        assert not STR_CONCAT.ordered


class TestGraphFormat:
    def test_parse_round_trip(self):
        g = parse_graph("v a\nv b\n# comment\ne a b 4\n")
        assert g.n == 2 and g.distance("a", "b") == 4

    def test_parse_error_carries_line_number(self):
        with pytest.raises(GraphError, match=":3:"):
            parse_graph("v a\nv b\ne a b pig\n")

    def test_undeclared_vertex_rejected(self):
        with pytest.raises(GraphError, match=":1:"):
            parse_graph("e a b 4\n")

    def test_unknown_directive(self):
        with pytest.raises(GraphError, match="unknown directive"):
            parse_graph("vertex a\n")
