import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from torsolab.graph import Graph

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@st.composite
def graphs(draw, max_n=8, min_n=0):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for v in range(n) for u in range(v)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, chosen)


@st.composite
def graph_and_permutation(draw, max_n=8):
    g = draw(graphs(max_n=max_n))
    perm = draw(st.permutations(range(g.n)))
    return g, list(perm)


def block_tree_graph(rng: random.Random, n_target: int) -> Graph:
    """Small connected blocks (at most 4 vertices each) glued along a vertex or an edge.

    Every block torso has at most four vertices, so the graph decomposes
    under a degree-3 bound while usually failing it as a single bag.
    """
    edges = set()
    n = 1
    anchors = [(0,)]
    while n < n_target:
        anchor = rng.choice(anchors)
        fresh = list(range(n, min(n_target, n + rng.randint(1, 4 - len(anchor)))))
        n += len(fresh)
        block = list(anchor) + fresh
        # random connected graph on the block: a spanning tree plus extra edges
        for i in range(1, len(block)):
            edges.add(tuple(sorted((block[i], block[rng.randrange(i)]))))
        for i in range(len(block)):
            for j in range(i):
                if rng.random() < 0.5:
                    edges.add(tuple(sorted((block[i], block[j]))))
        anchors.extend((v,) for v in block)
        anchors.extend(tuple(sorted(e)) for e in edges if set(e) <= set(block))
    return Graph(n, edges)


class AcceptanceLog:
    def __init__(self, capsys):
        self.capsys = capsys

    def __call__(self, number: int, ok: bool, detail: str) -> None:
        with self.capsys.disabled():
            print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture
def acceptance(capsys):
    return AcceptanceLog(capsys)
