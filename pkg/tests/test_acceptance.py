"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]`` / ``[FAIL]`` line with its runtime and
enforces its time bound. Run ``python3 tests/test_acceptance.py`` for the
lines alone, or ``pytest -s tests/test_acceptance.py``; the summary is
also repeated at the end of every pytest run.
"""

from __future__ import annotations

import random
import sys
import time
from itertools import product
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from modhom.dichotomy import (  # noqa: E402
    HARD,
    TRACTABLE,
    build_bis_reduction,
    classify,
    count_tractable,
    make_decomposition,
    single_vertex_gadget,
)
from modhom.graph import (  # noqa: E402
    COMPLETE_BIPARTITE,
    OTHER,
    Graph,
    PinnedGraph,
    bipartition,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    disjoint_union,
    is_connected,
    is_r_thin,
    path_graph,
)
from modhom.hom import TableCSP, count_hom, count_hom_mod, count_inj, graph_to_csp  # noqa: E402
from modhom.iso import are_isomorphic, iso_classes, iter_automorphisms  # noqa: E402
from modhom.mobius import aut_order, inj_via_inversion  # noqa: E402
from modhom.products import (  # noqa: E402
    cartesian_skeleton,
    check_splitting,
    diamond_product,
    local_p_automorphisms,
    skeleton_formula,
)
from modhom.reduction import constants_reduce, is_p_rigid, mpp_eval, p_reduce, strictify  # noqa: E402

RESULTS: list[str] = []


def criterion(num: int, title: str, bound: float):
    """Run the body, time it, record one line and fail on error or overrun."""

    def wrap(body):
        def test():
            t0 = time.perf_counter()
            detail, err = "", None
            try:
                detail = body() or ""
            except AssertionError as exc:
                err = exc
            dt = time.perf_counter() - t0
            ok = err is None and dt < bound
            why = detail if err is None else f"assertion: {err}"
            if err is None and dt >= bound:
                why = f"too slow ({dt:.1f}s >= {bound:.0f}s)"
            line = f"[{'PASS' if ok else 'FAIL'}] {num:2d}. {title} ({dt:.2f}s / {bound:g}s) {why}".rstrip()
            RESULTS.append(line)
            print(line, flush=True)
            if err is not None:
                raise err
            assert dt < bound, why

        test.__name__ = f"test_criterion_{num:02d}"
        test.__doc__ = title
        return test

    return wrap


def all_graphs(max_n: int, loops: bool = True):
    return [g for n in range(max_n + 1) for g in iso_classes(n, loops=loops)]


# ---------------------------------------------------------------------------


@criterion(1, "3-colorings vanish mod 3", 10)
def _c1():
    rng = random.Random(101)
    k3 = complete_graph(3)
    for _ in range(100):
        g = oracles.random_graph(rng, rng.randint(1, 6))
        assert count_hom_mod(g, k3, 3) == 0, g
    return "100 graphs"


test_criterion_01 = _c1


@criterion(2, "|Aut| via Moebius inversion", 300)
def _c2():
    hs = all_graphs(5)
    for h in hs:
        assert aut_order(h) == oracles.aut(h), h
    rng = random.Random(102)
    for _ in range(100):
        h = oracles.random_graph(rng, 6)
        assert aut_order(h) == oracles.aut(h), h
    return f"{len(hs)} classes + 100 random n=6"


test_criterion_02 = _c2


@criterion(3, "p-reduction congruence", 600)
def _c3():
    rng = random.Random(103)
    hs = all_graphs(5)
    checks = 0
    for h in hs:
        for p in (2, 3, 5):
            red = p_reduce(h, p)
            for _ in range(50):
                g = oracles.random_graph(rng, rng.randint(0, 5))
                assert count_hom_mod(g, h, p) == count_hom_mod(g, red, p), (h, p, g)
                checks += 1
    return f"{checks} (g, h, p) triples"


test_criterion_03 = _c3


@criterion(4, "reduced form independent of reduction order", 300)
def _c4():
    rng = random.Random(104)
    hs = all_graphs(5)
    for h in hs:
        for p in (2, 3):
            base = p_reduce(h, p)
            others = [p_reduce(h, p, choose="last")]
            others += [p_reduce(h, p, choose="random", rng=random.Random(rng.random())) for _ in range(3)]
            for o in others:
                assert are_isomorphic(o, base), (h, p)
    return f"{len(hs)} classes x 2 primes x 5 orders"


test_criterion_04 = _c4


def _tractable_target(rng: random.Random) -> Graph:
    parts = []
    for _ in range(rng.randint(1, 3)):
        kind = rng.choice(("iso", "refl", "kab"))
        if kind == "iso":
            parts.append(Graph(1))
        elif kind == "refl":
            q = rng.randint(1, 3)
            parts.append(Graph(q, [(u, v) for u in range(q) for v in range(u, q)]))
        else:
            parts.append(complete_bipartite(rng.randint(1, 3), rng.randint(1, 3), sorted=False))
    return disjoint_union(*parts)


@criterion(5, "closed-form counter for tractable targets", 120)
def _c5():
    assert count_tractable(path_graph(4), complete_bipartite(2, 3, sorted=False)) == 72
    rng = random.Random(105)
    for _ in range(200):
        h = _tractable_target(rng)
        g = oracles.random_graph(rng, rng.randint(0, 7), rng.choice((0.2, 0.4, 0.6)))
        assert count_tractable(g, h) == count_hom(g, h), (g, h)
    return "hom(P4, K_{2,3}) = 72; 200 random pairs"


test_criterion_05 = _c5


def _pin_orbits(g: Graph, arity: int):
    """One pin tuple per orbit of Aut(g) on ``V(g)^arity``."""
    auts = list(iter_automorphisms(g))
    seen = set()
    for t in product(range(g.n), repeat=arity):
        if t in seen:
            continue
        seen.update(tuple(a[x] for x in t) for a in auts)
        yield t


@criterion(6, "inversion identity for injective counts", 300)
def _c6():
    gs = all_graphs(4)
    pairs = 0
    for arity in (0, 1, 2):
        pinned = [PinnedGraph(g, t) for g in gs for t in _pin_orbits(g, arity)]
        for a in pinned:
            for b in pinned:
                assert inj_via_inversion(a, b) == count_inj(a, b), (a, b)
                pairs += 1
    rng = random.Random(106)
    for _ in range(200):
        g = oracles.random_graph(rng, rng.randint(1, 5))
        h = oracles.random_graph(rng, rng.randint(1, 5))
        k = rng.randint(0, 2)
        x = tuple(rng.randrange(g.n) for _ in range(k))
        y = tuple(rng.randrange(h.n) for _ in range(k))
        got = inj_via_inversion(PinnedGraph(g, x), PinnedGraph(h, y))
        assert got == count_inj(PinnedGraph(g, x), PinnedGraph(h, y)) == oracles.inj(g, h, list(zip(x, y)))
    return f"{pairs} pinned pairs up to isomorphism + 200 random"


test_criterion_06 = _c6


def _r_thin_factor(rng: random.Random, bip: bool) -> Graph:
    while True:
        n = rng.randint(2, 5)
        if bip:
            g = oracles.random_sorted_bipartite(rng, n, 0.6)
        else:
            g = oracles.random_graph(rng, n, 0.6, loops=False)
            if bipartition(g) is not None:
                continue
        if is_connected(g) and is_r_thin(g):
            return g


@criterion(7, "skeleton of a diamond product", 300)
def _c7():
    rng = random.Random(107)
    cases = [(True, True), (True, False), (False, True), (False, False)]
    for i in range(52):
        ba, bb = cases[i % 4]
        a, b = _r_thin_factor(rng, ba), _r_thin_factor(rng, bb)
        got = cartesian_skeleton(diamond_product(a, b))
        assert are_isomorphic(got, skeleton_formula(a, b)), (a, b)
    return "52 pairs, 13 per case"


test_criterion_07 = _c7


@criterion(8, "automorphisms of diamond squares split", 300)
def _c8():
    out = []
    for name, h in (("P3", path_graph(3, sorted=True)), ("P4", path_graph(4, sorted=True))):
        rep = check_splitting(h, 2)
        assert rep.failures == (), (name, rep.failures)
        loc = local_p_automorphisms(h, 2, 3)
        assert loc.failures == (), (name, loc.failures)
        out.append(f"{name}: {rep.automorphisms} auts split, {loc.automorphisms} order-3 local")
    return "; ".join(out)


test_criterion_08 = _c8


@criterion(9, "independent-set reduction congruence", 600)
def _c9():
    p4 = path_graph(4, sorted=True)
    z = make_decomposition(p4, ({0}, {1}, {2}, {3}), single_vertex_gadget("L"), single_vertex_gadget("R"), 3)
    rng = random.Random(109)
    for _ in range(200):
        g = oracles.random_sorted_bipartite(rng, rng.randint(0, 8), rng.choice((0.3, 0.5)))
        ind = sum(1 for _ in oracles.independent_sets(g))
        gp = build_bis_reduction(g, p4, z)
        assert count_hom_mod(gp, p4, 3) == ind % 3, g
    return "200 graphs"


test_criterion_09 = _c9


def _rigid_target(rng: random.Random, p: int) -> Graph:
    while True:
        h = oracles.random_graph(rng, rng.randint(1, 4))
        if is_p_rigid(h, p):
            return h


@criterion(10, "constants removed through a constant-free oracle", 300)
def _c10():
    k2 = complete_graph(2)
    assert constants_reduce(TableCSP(2, 1, (((0,), [(0,)]),)), k2, 3) == 1
    rng = random.Random(110)
    for i in range(30):
        p = (2, 3)[i % 2]
        h = _rigid_target(rng, p)
        g = oracles.random_graph(rng, rng.randint(1, 4))
        pins = [(x, rng.randrange(h.n)) for x in rng.sample(range(g.n), rng.randint(1, g.n))]
        base = graph_to_csp(g, h)
        inst = TableCSP(h.n, g.n, base.constraints + tuple(((x,), [(a,)]) for x, a in pins))
        assert constants_reduce(inst, h, p) == oracles.hom(g, h, pins) % p, (g, h, pins, p)
    return "K2/p=3 gives 1; 30 random instances"


test_criterion_10 = _c10


@criterion(11, "strictification keeps the relation", 120)
def _c11():
    rng = random.Random(111)
    for _ in range(20):
        k = rng.randint(1, 2)
        g = oracles.random_graph(rng, rng.randint(1, 4))
        gad = PinnedGraph(g, tuple(rng.randrange(g.n) for _ in range(k)))
        h = oracles.random_graph(rng, rng.randint(1, 4))
        for p in (2, 3, 5):
            before, after = mpp_eval(gad, h, p), mpp_eval(strictify(gad, p), h, p)
            assert after.tuples == before.tuples, (gad, h, p)
            assert all(c == 1 for _, c in after.counts if c), (gad, h, p)
    return "20 gadgets x 3 primes"


test_criterion_11 = _c11


@criterion(12, "classifier verdicts", 1)
def _c12():
    v = classify(cycle_graph(4), 2)
    assert v.verdict == TRACTABLE and v.reduced_target == Graph(0) and v.witness == ()
    v = classify(path_graph(4), 3)
    assert v.verdict == HARD and v.witness == ((frozenset(range(4)), OTHER),)
    v = classify(complete_bipartite(2, 3), 5)
    assert v.verdict == TRACTABLE and v.witness == ((frozenset(range(5)), COMPLETE_BIPARTITE),)
    return "C4/2 tractable (empty), P4/3 hard, K_{2,3}/5 tractable"


test_criterion_12 = _c12


if __name__ == "__main__":
    failed = 0
    for name in sorted(n for n in dir() if n.startswith("test_criterion_")):
        try:
            globals()[name]()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
