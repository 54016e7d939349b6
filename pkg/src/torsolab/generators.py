"""Small named graphs and seeded random graphs."""

from __future__ import annotations

import itertools
import random

from .graph import Graph


def empty_graph(n: int) -> Graph:
    return Graph(n)


def complete_graph(n: int) -> Graph:
    return Graph(n, itertools.combinations(range(n), 2))


def path_graph(n: int) -> Graph:
    return Graph(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph(n, ((i, (i + 1) % n) for i in range(n)))


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves} with centre 0."""
    return Graph(leaves + 1, ((0, i) for i in range(1, leaves + 1)))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, ((i, a + j) for i in range(a) for j in range(b)))


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def kneser_graph(n: int, k: int) -> Graph:
    """Vertices are the k-subsets of range(n) in lexicographic order; adjacent when disjoint."""
    subsets = list(itertools.combinations(range(n), k))
    edges = [
        (i, j)
        for i, j in itertools.combinations(range(len(subsets)), 2)
        if not set(subsets[i]) & set(subsets[j])
    ]
    return Graph(len(subsets), edges)


def glue(a: Graph, b: Graph, shared: int) -> Graph:
    """Identify the last ``shared`` vertices of ``a`` with the first ``shared`` of ``b``."""
    off = a.n - shared
    edges = list(a.edges) + [(u + off, v + off) for u, v in b.edges]
    return Graph(a.n + b.n - shared, edges)


def random_graph(n: int, p: float, rng: random.Random) -> Graph:
    return Graph(n, (e for e in itertools.combinations(range(n), 2) if rng.random() < p))


def random_permutation(n: int, rng: random.Random) -> list[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm
