import pytest
from hypothesis import given, settings, strategies as st

from conftest import graphs
from torsolab.config import SizeLimitError
from torsolab.decomposition import InvalidDecompositionError, TreeDecomposition, verify_decomposition
from torsolab.generators import cycle_graph, path_graph, petersen_graph
from torsolab.graph import Graph
from torsolab.pds import (PdsInstance, PdsSolution, dominated_count, elimination_decomposition, max_coverage_brute,
                          max_coverage_dp, solve_pds_brute, solve_pds_dp, solve_pds_dp_all)

P5_PATH_DECOMPOSITION = TreeDecomposition.build([(0, 1), (1, 2), (2, 3), (3, 4)], [0, 0, 1, 2])


def test_target_zero_chooses_nothing():
    assert solve_pds_brute(PdsInstance(petersen_graph(), 0)) == PdsSolution((), 0)


def test_path_and_cycle_examples():
    p5 = solve_pds_brute(PdsInstance(path_graph(5), 5))
    assert p5.size == 2 and p5.dominated_count == 5 and p5.chosen == (0, 3)
    c6 = solve_pds_brute(PdsInstance(cycle_graph(6), 6))
    assert c6.chosen == (0, 3)


def test_dp_on_width_one_path_decomposition():
    assert solve_pds_dp(PdsInstance(path_graph(5), 5), P5_PATH_DECOMPOSITION).size == 2


def test_single_bag_dp_matches_brute():
    g = petersen_graph()
    single = TreeDecomposition.build([range(10)], [0])
    for t in range(11):
        assert solve_pds_dp(PdsInstance(g, t), single) == solve_pds_brute(PdsInstance(g, t))


def test_instance_validation_and_guard():
    with pytest.raises(ValueError):
        PdsInstance(path_graph(3), 4)
    with pytest.raises(SizeLimitError):
        solve_pds_brute(PdsInstance(path_graph(17), 3))


def test_invalid_decomposition_rejected():
    with pytest.raises(InvalidDecompositionError) as info:
        solve_pds_dp(PdsInstance(path_graph(5), 3), TreeDecomposition.build([(0, 1), (2, 3, 4)], [0, 0]))
    assert "edge-coverage" in info.value.report.kinds()


def test_empty_graph():
    assert solve_pds_dp(PdsInstance(Graph(0), 0), elimination_decomposition(Graph(0))) == PdsSolution((), 0)


@given(graphs(max_n=10), st.randoms(use_true_random=False))
def test_elimination_decompositions_are_valid(g, rnd):
    order = list(range(g.n))
    rnd.shuffle(order)
    assert verify_decomposition(g, elimination_decomposition(g, order)).ok
    assert verify_decomposition(g, elimination_decomposition(g)).ok


@settings(max_examples=60)
@given(graphs(max_n=10), st.randoms(use_true_random=False))
def test_dp_equals_brute_for_every_target(g, rnd):
    order = list(range(g.n))
    rnd.shuffle(order)
    td = elimination_decomposition(g, order)
    every = solve_pds_dp_all(g, td)
    sizes = []
    for t in range(g.n + 1):
        brute = solve_pds_brute(PdsInstance(g, t))
        dp = solve_pds_dp(PdsInstance(g, t), td)
        assert dp == brute == every[t]
        assert dp.dominated_count == dominated_count(g, dp.chosen) >= t
        sizes.append(dp.size)
    assert sizes == sorted(sizes)


@settings(max_examples=30)
@given(graphs(max_n=9), st.integers(0, 9))
def test_max_coverage_matches_brute(g, k):
    k = min(k, g.n)
    assert max_coverage_dp(g, k, elimination_decomposition(g)) == max_coverage_brute(g, k)
