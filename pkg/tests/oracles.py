"""Brute-force reference implementations.

These deliberately share no code with the package beyond the Graph type:
maps and permutations are enumerated with itertools and checked edge by edge.
"""

from __future__ import annotations

import random
from itertools import combinations, permutations, product

from modhom.graph import Graph


def is_hom(g, h, m) -> bool:
    if g.sorts is not None and any(g.sorts[v] != h.sorts[m[v]] for v in range(g.n)):
        return False
    return all(h.has_edge(m[u], m[v]) for u, v in g.edges)


def homs(g, h, pins=()):
    for m in product(range(h.n), repeat=g.n):
        if all(m[x] == y for x, y in pins) and is_hom(g, h, m):
            yield m


def hom(g, h, pins=()) -> int:
    return sum(1 for _ in homs(g, h, pins))


def inj(g, h, pins=()) -> int:
    return sum(1 for m in homs(g, h, pins) if len(set(m)) == g.n)


def automorphisms(h):
    return [m for m in permutations(range(h.n)) if is_hom(h, h, m)]


def aut(h) -> int:
    return len(automorphisms(h))


def isomorphic(g, h) -> bool:
    if g.n != h.n or len(g.edges) != len(h.edges):
        return False
    if (g.sorts is None) != (h.sorts is None):
        return False
    return any(is_hom(g, h, m) for m in permutations(range(g.n)))


def perm_order(m) -> int:
    k, cur = 1, tuple(m)
    ident = tuple(range(len(m)))
    while cur != ident:
        cur = tuple(m[x] for x in cur)
        k += 1
    return k


def independent_sets(g):
    for mask in range(1 << g.n):
        if all(not (mask >> u & 1 and mask >> v & 1) for u, v in g.edges):
            yield [v for v in range(g.n) if mask >> v & 1]


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def csp_count(domain, nvars, constraints) -> int:
    return sum(
        1
        for val in product(range(domain), repeat=nvars)
        if all(tuple(val[x] for x in s) in set(map(tuple, t)) for s, t in constraints)
    )


def two_colorable(g) -> bool:
    return any(all(c[u] != c[v] for u, v in g.edges) for c in product((0, 1), repeat=g.n))


# random generators ---------------------------------------------------------


def random_graph(rng: random.Random, n: int, density: float = 0.5, loops: bool = True) -> Graph:
    edges = [e for e in combinations(range(n), 2) if rng.random() < density]
    if loops:
        edges += [(v, v) for v in range(n) if rng.random() < density / 3]
    return Graph(n, edges)


def random_sorted_bipartite(rng: random.Random, n: int, density: float = 0.5) -> Graph:
    sorts = tuple(rng.choice("LR") for _ in range(n))
    edges = [(u, v) for u, v in combinations(range(n), 2) if sorts[u] != sorts[v] and rng.random() < density]
    return Graph(n, edges, sorts)
