import itertools

import pytest

from frcodes import file_size_bruteforce, girth_code, graph_by_name, validate
from frcodes.errors import NotRegular
from frcodes.fields import gf
from frcodes.graphs import (GraphSpec, complete_bipartite, complete_graph, girth, petersen,
                            pg_incidence_graph)


def test_girths():
    assert petersen().g == 5 and petersen().s == 3
    assert complete_graph(4).g == 3
    assert complete_bipartite(3).g == 4
    assert pg_incidence_graph(gf(2)).g == 6
    assert girth(4, [(0, 1), (1, 2), (2, 3)]) is None


def test_graph_names():
    assert graph_by_name("K5").n == 5
    assert graph_by_name("K3,3").n == graph_by_name("K3x3").n == 6
    assert graph_by_name("pg2-2").n == 14
    with pytest.raises(ValueError):
        graph_by_name("hypercube")


def test_girth_code_parameters():
    assert validate(girth_code(petersen())).astuple() == (10, 15, 3, 2)
    assert validate(girth_code(complete_graph(5))).astuple() == (5, 10, 4, 2)
    with pytest.raises(NotRegular):
        girth_code(GraphSpec(3, ((0, 1), (1, 2)), "path"))


@pytest.mark.parametrize("graph", [petersen(), complete_bipartite(3), complete_graph(4),
                                   complete_graph(5), pg_incidence_graph(gf(2))])
def test_small_sets_cover_at_least_k_times_s_minus_one(graph):
    code = girth_code(graph)
    s = graph.s
    for k in range(1, min(graph.g, code.n) + 1):
        worst = min(code.union_size(c) for c in itertools.combinations(range(code.n), k))
        assert worst >= k * (s - 1)


def test_petersen_profile_frozen():
    code = girth_code(petersen())
    # brute-force values, frozen
    assert [file_size_bruteforce(code, k)[0] for k in range(1, 11)] == [3, 5, 7, 9, 10, 12, 13, 14, 15, 15]
    assert file_size_bruteforce(code, 2)[0] == 5 and file_size_bruteforce(code, 5)[0] == 10
