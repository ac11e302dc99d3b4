import json
import random

import pytest
from hypothesis import given, settings

from modhom.exceptions import SortError
from modhom.graph import (
    COMPLETE_BIPARTITE,
    ISOLATED_VERTEX,
    OTHER,
    REFLEXIVE_CLIQUE,
    Graph,
    Partition,
    PinnedGraph,
    bipartition,
    complete_bipartite,
    complete_graph,
    connected_components,
    cycle_graph,
    disjoint_union,
    graph_from_json,
    graph_to_json,
    induced_subgraph,
    is_r_thin,
    neighborhood,
    path_graph,
    quotient,
    r_classes,
    structural_class,
)

import oracles
from strategies import graphs, sorted_graphs

P4 = path_graph(4)


class TestGraphType:
    def test_edges_normalized(self):
        g = Graph(3, [(2, 0), (0, 2), (1, 1)])
        assert g.edges == frozenset({(0, 2), (1, 1)})
        assert g.has_edge(2, 0) and g.has_loop(1) and not g.has_loop(0)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            Graph(2, [(0, 2)])

    def test_sorts_must_cross_edges(self):
        with pytest.raises(SortError):
            Graph(2, [(0, 1)], ("L", "L"))
        with pytest.raises(SortError):
            Graph(1, [(0, 0)], ("L",))

    def test_relabel(self):
        g = path_graph(3).relabel([2, 1, 0])
        assert g.edges == frozenset({(1, 2), (0, 1)})

    def test_pinned_validates(self):
        with pytest.raises(ValueError):
            PinnedGraph(P4, (4,))
        assert PinnedGraph(P4, (1, 1)).arity == 2


class TestPartition:
    def test_canonical(self):
        a = Partition(4, ((3, 1), (0,), (2,)))
        b = Partition.from_labels([5, 0, 7, 0])
        assert a == b
        assert a.blocks == ((0,), (1, 3), (2,))

    def test_rejects_bad_cover(self):
        with pytest.raises(ValueError):
            Partition(3, ((0, 1),))
        with pytest.raises(ValueError):
            Partition(3, ((0, 1), (1, 2)))


def test_components():
    assert connected_components(Graph(0)) == []
    assert connected_components(P4) == [frozenset(range(4))]
    two = Graph(4, [(0, 1), (2, 3)])
    assert connected_components(two) == [frozenset({0, 1}), frozenset({2, 3})]


def test_bipartition_examples():
    assert bipartition(complete_graph(3)) is None
    assert bipartition(P4) == ("L", "R", "L", "R")
    assert bipartition(Graph(1, [(0, 0)])) is None


def test_r_classes_examples():
    k23 = complete_bipartite(2, 3)
    assert r_classes(k23).blocks == ((0, 1), (2, 3, 4))
    assert r_classes(P4).is_discrete
    assert r_classes(Graph(3)).blocks == ((0, 1, 2),)
    assert is_r_thin(P4) and not is_r_thin(k23) and is_r_thin(Graph(1))


def test_quotient_examples():
    assert quotient(P4, Partition.discrete(4)) == P4
    assert quotient(path_graph(2), Partition.indiscrete(2)) == Graph(1, [(0, 0)])
    q = quotient(P4, Partition(4, ((0, 3), (1, 2))))
    assert q == Graph(2, [(0, 1), (1, 1)])


def test_quotient_drops_mixed_sorts():
    g = path_graph(4, sorted=True)
    assert quotient(g, Partition(4, ((0, 2), (1, 3)))).sorts == ("L", "R")
    assert quotient(g, Partition(4, ((0, 1), (2, 3)))).sorts is None


def test_induced_subgraph_examples():
    assert induced_subgraph(P4, range(4)) == P4
    assert induced_subgraph(P4, [0, 2]) == Graph(2)
    assert induced_subgraph(cycle_graph(4), [0, 2]) == Graph(2)


def test_structural_class_examples():
    assert structural_class(Graph(1)) == ISOLATED_VERTEX
    assert structural_class(Graph(2, [(0, 0), (1, 1), (0, 1)])) == REFLEXIVE_CLIQUE
    assert structural_class(P4) == OTHER
    assert structural_class(complete_bipartite(2, 3)) == COMPLETE_BIPARTITE
    assert structural_class(Graph(1, [(0, 0)])) == REFLEXIVE_CLIQUE
    with pytest.raises(ValueError):
        structural_class(Graph(2))


def test_neighborhood():
    assert neighborhood(P4, [0]) == {1}
    assert neighborhood(P4, [1, 2]) == {0, 1, 2, 3}
    assert neighborhood(P4, []) == frozenset()


def test_disjoint_union():
    g = disjoint_union(path_graph(2), Graph(1, [(0, 0)]))
    assert g == Graph(3, [(0, 1), (2, 2)])


class TestJson:
    def test_round_trip(self):
        g = path_graph(4, sorted=True)
        assert graph_from_json(json.loads(json.dumps(graph_to_json(g)))) == g
        pg = PinnedGraph(P4, (0, 0, 3))
        assert graph_from_json(graph_to_json(pg)) == pg

    @pytest.mark.parametrize(
        "obj",
        [
            {"n": 2, "edges": [[0, 2]]},
            {"n": 2, "edges": [[0]]},
            {"n": "2"},
            {"edges": []},
            {"n": 2, "colour": 1},
            {"n": 2, "edges": [[0, 1]], "pins": [3]},
        ],
    )
    def test_rejects(self, obj):
        with pytest.raises(ValueError):
            graph_from_json(obj)

    @pytest.mark.parametrize(
        "sorts",
        [{"L": [0, 1], "R": []}, {"L": [0], "R": [0, 1]}, {"L": [0]}, {"L": [0], "R": [1], "X": []}],
    )
    def test_rejects_bad_sorts(self, sorts):
        with pytest.raises(SortError):
            graph_from_json({"n": 2, "edges": [[0, 1]], "sorts": sorts})


# properties ---------------------------------------------------------------


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=7))
def test_quotient_by_discrete_is_isomorphic(g):
    assert oracles.isomorphic(quotient(g, Partition.discrete(g.n)), g)


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=7))
def test_r_quotient_is_r_thin(g):
    q = quotient(g, r_classes(g))
    assert r_classes(q).is_discrete


@settings(max_examples=100, deadline=None)
@given(graphs(max_n=7))
def test_bipartition_matches_two_coloring(g):
    s = bipartition(g)
    if s is None:
        assert g.loop_mask or not oracles.two_colorable(g)
    else:
        assert all(s[u] != s[v] for u, v in g.edges)


@settings(max_examples=60, deadline=None)
@given(sorted_graphs(max_n=6))
def test_json_round_trip(g):
    assert graph_from_json(graph_to_json(g)) == g


def test_components_match_reachability():
    rng = random.Random(7)
    for _ in range(50):
        g = oracles.random_graph(rng, rng.randint(0, 7), 0.3)
        comps = connected_components(g)
        assert sorted(v for c in comps for v in c) == list(range(g.n))
        for c in comps:
            for u in c:
                for v in range(g.n):
                    if g.has_edge(u, v):
                        assert v in c
