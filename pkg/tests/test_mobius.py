import random
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modhom.graph import Graph, Partition, PinnedGraph, complete_bipartite, complete_graph, path_graph
from modhom.hom import count_hom_pinned, count_inj
from modhom.mobius import (
    aut_order,
    bell,
    enumerate_partitions,
    indistinguishable,
    inj_via_inversion,
    mobius_weight,
    stabilizer,
)

import oracles
from strategies import graphs, pinned_graphs


class TestPartitions:
    def test_bell_counts(self):
        assert [sum(1 for _ in enumerate_partitions(n)) for n in range(8)] == [1, 1, 2, 5, 15, 52, 203, 877]
        assert [bell(n) for n in range(8)] == [1, 1, 2, 5, 15, 52, 203, 877]

    def test_each_once(self):
        parts = list(enumerate_partitions(5))
        assert len(set(parts)) == 52
        want = {Partition(5, tuple(tuple(b) for b in bl)) for bl in oracles.set_partitions(range(5))}
        assert set(parts) == want

    def test_first_is_indiscrete(self):
        # restricted-growth strings start at all zeros
        assert next(enumerate_partitions(3)) == Partition.indiscrete(3)

    def test_cap(self):
        with pytest.raises(ValueError):
            next(enumerate_partitions(11))
        assert sum(1 for _ in enumerate_partitions(3, max_n=3)) == 5
        with pytest.raises(ValueError):
            next(enumerate_partitions(4, max_n=3))


class TestWeights:
    def test_examples(self):
        assert mobius_weight(Partition.discrete(4)) == 1
        assert mobius_weight(Partition.indiscrete(3)) == 2
        assert mobius_weight(Partition(3, ((0, 1), (2,)))) == -1

    @pytest.mark.parametrize("n", range(2, 8))
    def test_weights_cancel(self, n):
        assert sum(mobius_weight(t) for t in enumerate_partitions(n)) == 0


class TestInversion:
    def test_examples(self):
        k2, k3 = complete_graph(2), complete_graph(3)
        assert inj_via_inversion(k2, k2) == 2
        assert inj_via_inversion(k3, k3) == 6
        g = PinnedGraph(path_graph(3), (0, 0))
        h = PinnedGraph(path_graph(3), (0, 1))
        assert inj_via_inversion(g, h) == 0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            inj_via_inversion(PinnedGraph(Graph(1), (0,)), Graph(2))

    def test_sorted(self):
        rng = random.Random(2)
        for _ in range(30):
            g = oracles.random_sorted_bipartite(rng, rng.randint(1, 4))
            h = oracles.random_sorted_bipartite(rng, rng.randint(1, 4))
            assert inj_via_inversion(g, h) == oracles.inj(g, h)


class TestAut:
    def test_examples(self):
        assert aut_order(complete_graph(2)) == 2
        assert aut_order(path_graph(4)) == 2
        assert aut_order(complete_bipartite(2, 3)) == 12

    def test_stabilizer(self):
        c4 = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        assert len(stabilizer(c4, [0])) == 2
        assert stabilizer(path_graph(4), [0]) == [(0, 1, 2, 3)]


class TestIndistinguishable:
    def test_reflection(self):
        res = indistinguishable(path_graph(4), 0, 3)
        assert res.kind == "isomorphic" and res.automorphism == (3, 2, 1, 0)

    def test_distinguished_by_edge(self):
        res = indistinguishable(path_graph(4), 0, 2, search_bound=2)
        assert res.kind == "distinguished"
        assert res.witness.graph.n == 2 and len(res.witness.graph.edges) == 1
        assert res.counts == (1, 2)

    def test_identity(self):
        res = indistinguishable(complete_bipartite(2, 2), 1, 1)
        assert res.kind == "isomorphic"

    def test_inconclusive_at_zero_bound(self):
        assert indistinguishable(path_graph(4), 0, 1, search_bound=0).kind == "inconclusive"

    def test_bad_vertex(self):
        with pytest.raises(ValueError):
            indistinguishable(path_graph(2), 0, 5)

    def test_witness_separates(self):
        rng = random.Random(8)
        for _ in range(30):
            h = oracles.random_graph(rng, rng.randint(2, 5))
            a, b = rng.sample(range(h.n), 2)
            res = indistinguishable(h, a, b)
            if res.kind == "distinguished":
                ca = count_hom_pinned(res.witness, PinnedGraph(h, (a,)))
                cb = count_hom_pinned(res.witness, PinnedGraph(h, (b,)))
                assert ca != cb
                assert not any(m[a] == b for m in oracles.automorphisms(h))
            elif res.kind == "isomorphic":
                assert res.automorphism[a] == b


def test_constant_count_forces_divisible_stabilizer():
    # paths pinned at an end land on a vertex of K_{3,3} in 3^(k-1) ways,
    # constant 0 mod 3, and the stabilizer of that vertex has order 2!·3! = 12
    h = complete_bipartite(3, 3, sorted=False)
    p = 3
    probes = [PinnedGraph(path_graph(k), (0,)) for k in range(2, 6)]
    assert {count_hom_pinned(k, PinnedGraph(h, (0,)), mod=p) for k in probes} == {0}
    assert len(stabilizer(h, [0])) == 12


# properties ---------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=6))
def test_aut_order_matches_oracle(h):
    assert aut_order(h) == oracles.aut(h)


@settings(max_examples=80, deadline=None)
@given(pinned_graphs(arity=1, max_n=5), pinned_graphs(arity=1, max_n=5))
def test_inversion_matches_inj(g, h):
    assert inj_via_inversion(g, h) == count_inj(g, h)
