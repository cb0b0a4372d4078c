import random
from pathlib import Path

import pytest

from effectsum import Graph, load_decomposition, load_graph

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def fig_tree() -> Graph:
    return load_graph(DATA / "fig_tree.txt")


@pytest.fixture(scope="session")
def fig_tree_deg3() -> Graph:
    return load_graph(DATA / "fig_tree_deg3.txt")


@pytest.fixture(scope="session")
def fig_graph() -> Graph:
    return load_graph(DATA / "fig_graph.txt")


@pytest.fixture(scope="session")
def fig_graph_decomp():
    return load_decomposition(DATA / "fig_graph_decomp.txt")


def random_degree_capped_tree(n: int, rng: random.Random, max_degree: int = 8,
                              max_length: int = 20) -> Graph:
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
