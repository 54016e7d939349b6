import itertools

import pytest
from hypothesis import given, settings

from conftest import graphs
from torsolab.config import Ceilings, SizeLimitError
from torsolab.generators import (complete_bipartite, complete_graph, cycle_graph, empty_graph, path_graph,
                                 petersen_graph, star_graph)
from torsolab.graph import Graph, contract_edge, disjoint_union, induced_subgraph, is_subgraph
from torsolab.oracles import (MinorModel, TopologicalModel, automorphisms, compose, find_minor,
                              find_topological_subgraph, inverse, is_isomorphic_brute, is_isomorphism,
                              is_minor_model, is_topological_model)


def minor_by_contraction(h: Graph, g: Graph) -> bool:
    """Independent reference: delete vertices and edges, contract edges, compare by brute force."""
    seen = set()

    def search(x: Graph) -> bool:
        key = (x.n, x.edges)
        if key in seen or x.n < h.n or x.m < h.m:
            return False
        seen.add(key)
        if x.n == h.n and any(is_subgraph(h.relabel(p), x) for p in itertools.permutations(range(x.n))):
            return True
        for e in x.sorted_edges():
            if search(Graph(x.n, x.edges - {e})) or search(contract_edge(x, e)):
                return True
        for v in range(x.n):
            if search(induced_subgraph(x, [u for u in range(x.n) if u != v])[0]):
                return True
        return False

    return search(g)


def test_identity_minor_has_singleton_branch_sets():
    g = cycle_graph(7)
    assert find_minor(g, g).branch_sets == tuple((v,) for v in range(7))


def test_k5_minor_of_petersen():
    model = find_minor(complete_graph(5), petersen_graph())
    assert model is not None
    assert is_minor_model(complete_graph(5), petersen_graph(), model)


def test_k4_not_a_minor_of_c5():
    assert find_minor(complete_graph(4), cycle_graph(5)) is None


def test_topological_identity_on_k4():
    model = find_topological_subgraph(complete_graph(4), complete_graph(4))
    assert model.branch_vertices == (0, 1, 2, 3)
    assert all(len(p) == 2 for _, p in model.paths)


def test_no_topological_k5_in_petersen():
    assert find_topological_subgraph(complete_graph(5), petersen_graph()) is None


def test_c4_subdivision_in_c6():
    model = find_topological_subgraph(cycle_graph(4), cycle_graph(6))
    assert model is not None and is_topological_model(cycle_graph(4), cycle_graph(6), model)


def test_k33_topological_in_petersen():
    g = petersen_graph()
    model = find_topological_subgraph(complete_bipartite(3, 3), g)
    assert model is not None and is_topological_model(complete_bipartite(3, 3), g, model)


def test_disconnected_pattern_embeds_disjointly():
    h = disjoint_union(complete_graph(3), complete_graph(3))
    assert find_minor(h, cycle_graph(6)) is None
    model = find_minor(h, disjoint_union(cycle_graph(4), cycle_graph(3)))
    assert model is not None
    assert len({v for b in model.branch_sets for v in b}) == sum(len(b) for b in model.branch_sets)


def test_isomorphism_examples():
    g = petersen_graph()
    assert is_isomorphic_brute(g, g) == tuple(range(10))
    assert is_isomorphic_brute(path_graph(4), star_graph(3)) is None
    assert is_isomorphic_brute(cycle_graph(6), disjoint_union(complete_graph(3), complete_graph(3))) is None


def test_automorphism_counts():
    assert len(automorphisms(complete_graph(3))) == 6
    assert len(automorphisms(cycle_graph(4))) == 8
    assert automorphisms(empty_graph(1)) == [(0,)]
    assert len(automorphisms(petersen_graph())) == 120


def test_automorphisms_sorted_and_include_identity():
    auts = automorphisms(cycle_graph(5))
    assert auts == sorted(auts) and auts[0] == tuple(range(5))


def test_ceiling_guard():
    big = path_graph(17)
    with pytest.raises(SizeLimitError):
        find_minor(complete_graph(3), big)
    with pytest.raises(SizeLimitError):
        find_topological_subgraph(complete_graph(3), big)
    with pytest.raises(SizeLimitError):
        automorphisms(big)
    with pytest.raises(SizeLimitError):
        find_minor(complete_graph(3), cycle_graph(5), Ceilings(host=4))
    with pytest.raises(SizeLimitError):
        find_minor(complete_graph(9), complete_graph(10))


def test_ceiling_from_environment(monkeypatch):
    monkeypatch.setenv("TORSOLAB_CEILING", "host=20")
    assert find_minor(complete_graph(3), cycle_graph(18)) is not None
    monkeypatch.setenv("TORSOLAB_CEILING", "5")
    with pytest.raises(SizeLimitError):
        find_minor(complete_graph(3), cycle_graph(6))


def test_invalid_models_rejected():
    g = cycle_graph(5)
    assert not is_minor_model(complete_graph(3), g, MinorModel(((0,), (2,), (3,))))
    assert not is_minor_model(complete_graph(3), g, MinorModel(((0, 2), (1,), (3, 4))))
    assert is_minor_model(complete_graph(3), g, MinorModel(((0,), (1,), (2, 3, 4))))
    bad = TopologicalModel((0, 1, 2), (((0, 1), (0, 1)), ((0, 2), (0, 1, 2)), ((1, 2), (1, 2))))
    assert not is_topological_model(complete_graph(3), g, bad)


@settings(max_examples=40)
@given(graphs(max_n=6), graphs(max_n=4, min_n=1))
def test_minor_agrees_with_contraction_search(g, h):
    model = find_minor(h, g)
    assert (model is not None) == minor_by_contraction(h, g)
    if model is not None:
        assert is_minor_model(h, g, model)


@settings(max_examples=80)
@given(graphs(max_n=8), graphs(max_n=5))
def test_topological_implies_minor(g, h):
    model = find_topological_subgraph(h, g)
    if model is not None:
        assert is_topological_model(h, g, model)
        assert find_minor(h, g) is not None


@settings(max_examples=40)
@given(graphs(max_n=7), graphs(max_n=4, min_n=1))
def test_minor_monotone_under_supergraph(g, h):
    if find_minor(h, g) is not None:
        extra = Graph(g.n + 1, set(g.edges) | {(v, g.n) for v in range(0, g.n, 2)})
        assert find_minor(h, extra) is not None


@settings(max_examples=60)
@given(graphs(max_n=6))
def test_automorphism_group_axioms(g):
    auts = automorphisms(g)
    group = set(auts)
    expected = {p for p in itertools.permutations(range(g.n)) if g.relabel(p) == g}
    assert group == expected
    for p in auts:
        assert inverse(p) in group
        for q in auts[:5]:
            assert compose(p, q) in group


@given(graphs(max_n=7), graphs(max_n=7))
def test_brute_isomorphism_sound(g, h):
    phi = is_isomorphic_brute(g, h)
    if phi is not None:
        assert is_isomorphism(g, h, phi)
    else:
        assert g.n != h.n or not any(g.relabel(p) == h for p in itertools.permutations(range(g.n)))
