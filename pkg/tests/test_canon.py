import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import block_tree_graph, graph_and_permutation, graphs
from torsolab.canon import (ColoredGraph, canonical_form, canonise_refined, canonise_small, canonise_torso,
                            isomorphic, lift_canonisation, serialize)
from torsolab.config import Ceilings, SizeLimitError
from torsolab.decomposition import DecompositionNotFound, InvalidDecompositionError, TorsoConstraint, TreeDecomposition
from torsolab.generators import (complete_graph, cycle_graph, empty_graph, glue, kneser_graph, path_graph,
                                 petersen_graph, random_graph, random_permutation, star_graph)
from torsolab.graph import Graph, disjoint_union
from torsolab.oracles import is_isomorphic_brute
from torsolab.treelike import from_tree_decomposition, invariant_decompose

ANY = TorsoConstraint(degree=100)
DEG3 = TorsoConstraint(apex=0, degree=3)


def brute_certificate(cg: ColoredGraph) -> bytes:
    """Least serialization over every colour-preserving relabeling, by enumeration."""
    g, colors = cg.graph, cg.colors
    best = None
    for order in itertools.permutations(range(g.n)):
        witness = [0] * g.n
        for label, v in enumerate(order):
            witness[v] = label
        s = serialize(g.relabel(witness), [colors[v] for v in order])
        if best is None or s < best:
            best = s
    return best


@st.composite
def colored_graphs(draw, max_n=6, max_colors=2):
    g = draw(graphs(max_n=max_n))
    colors = draw(st.lists(st.integers(0, max_colors - 1), min_size=g.n, max_size=g.n))
    return ColoredGraph(g, tuple(colors))


def test_k2_bytes():
    assert canonise_small(ColoredGraph.uniform(complete_graph(2))).certificate == bytes.fromhex("4702000000018000")


def test_single_vertex_certificate_fixed():
    assert canonise_small(ColoredGraph(Graph(1), (3,))).certificate == bytes.fromhex("4701030000")
    assert canonise_small(ColoredGraph(Graph(1), (0,))).certificate == bytes.fromhex("4701000000")


def test_p3_centre_relabelled():
    a = Graph(3, [(0, 1), (1, 2)])
    b = Graph(3, [(1, 0), (0, 2)])
    assert canonise_small(ColoredGraph.uniform(a)).certificate == canonise_small(ColoredGraph.uniform(b)).certificate


def test_p4_and_claw_differ():
    assert (canonise_small(ColoredGraph.uniform(path_graph(4))).certificate
            != canonise_small(ColoredGraph.uniform(star_graph(3))).certificate)


def test_small_ceiling():
    with pytest.raises(SizeLimitError):
        canonise_small(ColoredGraph.uniform(empty_graph(11)))
    with pytest.raises(SizeLimitError):
        canonise_small(ColoredGraph.uniform(empty_graph(5)), Ceilings(exhaustive=4))


def test_c6_and_two_triangles_differ():
    two = disjoint_union(complete_graph(3), complete_graph(3))
    assert canonise_refined(ColoredGraph.uniform(cycle_graph(6))).certificate != \
        canonise_refined(ColoredGraph.uniform(two)).certificate


def test_refined_handles_symmetric_graphs_beyond_ceiling():
    for g in (empty_graph(14), complete_graph(14), cycle_graph(16), kneser_graph(6, 2)):
        form = canonise_refined(ColoredGraph.uniform(g))
        assert serialize(g.relabel(form.witness)) == form.certificate


@settings(max_examples=120)
@given(colored_graphs())
def test_both_canonisers_equal_brute_least(cg):
    expected = brute_certificate(cg)
    assert canonise_small(cg).certificate == expected
    assert canonise_refined(cg).certificate == expected


def test_agreement_on_every_labelled_graph_with_five_vertices():
    pairs = list(itertools.combinations(range(5), 2))
    for mask in range(1 << len(pairs)):
        g = Graph(5, [p for i, p in enumerate(pairs) if mask >> i & 1])
        cg = ColoredGraph.uniform(g)
        assert canonise_small(cg) == canonise_refined(cg)


@settings(max_examples=80)
@given(graph_and_permutation(max_n=10))
def test_relabelling_invariance_and_witness(gp):
    g, perm = gp
    a = canonise_refined(ColoredGraph.uniform(g))
    b = canonise_refined(ColoredGraph.uniform(g.relabel(perm)))
    assert a.certificate == b.certificate
    assert serialize(g.relabel(a.witness)) == a.certificate


def test_torso_examples():
    tri = complete_graph(3)
    assert canonise_torso(tri).certificate == canonise_torso(Graph(3, [(2, 0), (0, 1), (1, 2)])).certificate
    red = canonise_torso(tri, {0: 1})
    blue = canonise_torso(tri, {0: 2})
    assert red.certificate != blue.certificate
    # torso of bag {0,1,3} of C4 is a triangle; local vertices 1 and 2 are the adhesion {1,3}
    swapped = tri.relabel([0, 2, 1])
    assert canonise_torso(tri, {1: 1, 2: 1}).certificate == canonise_torso(swapped, {1: 1, 2: 1}).certificate


def test_torso_dispatch_agrees_above_ceiling():
    g = random_graph(11, 0.4, random.Random(4))
    assert canonise_torso(g).certificate == canonise_refined(ColoredGraph.uniform(g)).certificate


def test_single_bag_lift_equals_torso_canonisation():
    g = petersen_graph()
    d = from_tree_decomposition(TreeDecomposition.build([range(10)], [0]))
    assert lift_canonisation(g, d, ANY).certificate == canonise_torso(g).certificate


def test_k4_pairs_sharing_vertex_or_edge_differ():
    vertex = glue(complete_graph(4), complete_graph(4), 1)
    edge = glue(complete_graph(4), complete_graph(4), 2)
    a = lift_canonisation(vertex, invariant_decompose(vertex, DEG3), DEG3)
    b = lift_canonisation(edge, invariant_decompose(edge, DEG3), DEG3)
    assert a.certificate != b.certificate
    assert not isomorphic(vertex, edge, DEG3)


def test_lift_rejects_bad_decompositions():
    g = cycle_graph(4)
    with pytest.raises(InvalidDecompositionError) as info:
        lift_canonisation(g, from_tree_decomposition(TreeDecomposition.build([(0, 1, 3), (1, 2, 3)], [0, 0])), ANY)
    assert info.value.report.kinds() == ["invariance"]
    with pytest.raises(InvalidDecompositionError):
        lift_canonisation(g, from_tree_decomposition(TreeDecomposition.build([(0, 1, 2)], [0])), ANY)


def test_empty_graph_has_empty_certificate():
    assert canonical_form(Graph(0), ANY).certificate == b""


def test_isomorphism_examples():
    g = petersen_graph()
    assert isomorphic(g, g, ANY)
    assert isomorphic(g, kneser_graph(5, 2), ANY)
    assert not isomorphic(path_graph(4), star_graph(3), ANY)
    assert not isomorphic(cycle_graph(6), disjoint_union(complete_graph(3), complete_graph(3)), ANY)


def test_lifted_forms_on_block_graphs():
    rng = random.Random(8)
    forms = {}
    for _ in range(60):
        g = block_tree_graph(rng, rng.randint(6, 10))
        form = canonical_form(g, DEG3)
        h = g.relabel(random_permutation(g.n, rng))
        assert canonical_form(h, DEG3).certificate == form.certificate
        assert serialize(g.relabel(form.witness)) == form.certificate
        forms.setdefault(form.certificate, []).append(g)
    reps = [gs[0] for gs in forms.values()]
    for cert, gs in forms.items():
        assert all(is_isomorphic_brute(gs[0], x) is not None for x in gs)
    for a, b in itertools.combinations(reps, 2):
        if a.n == b.n and a.m == b.m:
            assert is_isomorphic_brute(a, b) is None


@settings(max_examples=60)
@given(graph_and_permutation(max_n=8), st.sampled_from([DEG3, TorsoConstraint(apex=1, degree=2)]))
def test_lifted_certificate_invariance(gp, c):
    g, perm = gp
    try:
        form = canonical_form(g, c)
    except DecompositionNotFound:
        return
    assert canonical_form(g.relabel(perm), c).certificate == form.certificate
    assert form.certificate == canonical_form(g, c).certificate
