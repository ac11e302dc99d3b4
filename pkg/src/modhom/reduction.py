"""p-automorphisms, p-reduced forms, and modular gadgets.

Counting modulo p is insensitive to orbits of size p. If π is an
automorphism of h of prime order p, the maps g -> h not landing in Fix(π)
split into π-orbits of size p, so hom(g, h) ≡ hom(g, h[Fix(π)]) (mod p).
Repeating this until no such π exists gives the p-reduced form.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Iterator, Sequence, TextIO

from .exceptions import SearchExhausted, SortError
from .graph import Graph, Partition, PinnedGraph, induced_subgraph, neighborhood, quotient_pinned
from .hom import TableCSP, count_csp, count_hom_pinned, iter_homs, odot_power, product_pinned
from .iso import is_automorphism, iter_automorphisms
from .mobius import aut_order, enumerate_partitions, mobius_weight


@dataclass(frozen=True)
class Automorphism:
    mapping: tuple

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(self.mapping))

    @property
    def order(self) -> int:
        m = self.mapping
        k, cur = 1, m
        ident = tuple(range(len(m)))
        while cur != ident:
            cur = tuple(m[x] for x in cur)
            k += 1
        return k

    @property
    def fixed_points(self) -> tuple[int, ...]:
        return tuple(v for v, w in enumerate(self.mapping) if v == w)

    def __call__(self, v: int) -> int:
        return self.mapping[v]


def automorphisms(h: Graph) -> list[Automorphism]:
    """The whole automorphism group (sort-preserving when ``h`` is sorted)."""
    return [Automorphism(m) for m in iter_automorphisms(h)]


def _cycle_type_prune(p: int):
    """Reject partial maps that already contain a cycle of length other than 1 or p."""

    def prune(img: list[int]) -> bool:
        k = len(img)
        v = k - 1
        # only cycles through the newest vertex can have changed
        w, steps = img[v], 1
        while w != v and w < k:
            w = img[w]
            steps += 1
            if steps > p:
                return True
        if w == v:
            return steps != 1 and steps != p
        # open chain ending at an unassigned vertex; count it from its start
        start = v
        for _ in range(k):
            pre = next((u for u in range(k) if img[u] == start), None)
            if pre is None or pre == v:
                break
            start = pre
        length, w = 1, start
        while w < k:
            w = img[w]
            length += 1
        return length > p

    return prune


def iter_p_automorphisms(h: Graph, p: int, fixed: Iterable[int] = ()) -> Iterator[Automorphism]:
    """Automorphisms of order exactly ``p`` fixing ``fixed``, in lex order."""
    fx = {v: v for v in fixed}
    for m in iter_automorphisms(h, fixed=fx, prune=_cycle_type_prune(p)):
        if any(v != w for v, w in enumerate(m)):
            yield Automorphism(m)


def find_p_automorphism(h: Graph, p: int, fixed: Iterable[int] = ()) -> Automorphism | None:
    """The lexicographically least automorphism of order ``p``, if any."""
    return next(iter_p_automorphisms(h, p, fixed), None)


def is_p_rigid(h: Graph, p: int, fixed: Iterable[int] = ()) -> bool:
    return find_p_automorphism(h, p, fixed) is None


def fixed_point_substructure(h: Graph, a: Automorphism | Sequence[int]) -> Graph:
    mapping = a.mapping if isinstance(a, Automorphism) else tuple(a)
    if not is_automorphism(h, mapping):
        raise ValueError("mapping is not an automorphism of the graph")
    return induced_subgraph(h, [v for v in range(h.n) if mapping[v] == v])


def _reduce(h: Graph, p: int, choose: str, rng: random.Random | None, fixed: Sequence[int]):
    """Run the reduction, returning the result and the kept original vertices."""
    kept = list(range(h.n))
    cur = h
    fixed_local = list(fixed)
    while True:
        if choose == "lex":
            a = find_p_automorphism(cur, p, fixed_local)
        else:
            options = list(iter_p_automorphisms(cur, p, fixed_local))
            if not options:
                a = None
            elif choose == "last":
                a = options[-1]
            elif choose == "random":
                a = (rng or random.Random(0)).choice(options)
            else:
                raise ValueError(f"unknown choice strategy {choose!r}")
        if a is None:
            return cur, kept
        fix = a.fixed_points
        pos = {v: i for i, v in enumerate(fix)}
        cur = induced_subgraph(cur, fix)
        kept = [kept[v] for v in fix]
        fixed_local = [pos[v] for v in fixed_local]


def p_reduce(
    h: Graph,
    p: int,
    choose: str = "lex",
    rng: random.Random | None = None,
    fixed: Sequence[int] = (),
) -> Graph:
    """Restrict to fixed points of p-automorphisms until none remain.

    ``choose`` picks the automorphism at each step: ``"lex"`` (least),
    ``"last"`` (greatest) or ``"random"``. Vertices in ``fixed`` must be
    fixed by every automorphism used; they always survive.
    """
    return _reduce(h, p, choose, rng, fixed)[0]


def p_reduce_pinned(h: PinnedGraph, p: int) -> PinnedGraph:
    """p-reduced form of a pinned graph; pins are fixed throughout."""
    g, kept = _reduce(h.graph, p, "lex", None, sorted(set(h.pins)))
    pos = {v: i for i, v in enumerate(kept)}
    return PinnedGraph(g, tuple(pos[v] for v in h.pins))


# ---------------------------------------------------------------------------
# constants reduction


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def _identify(nvars: int, domain: int, constraints, pairs) -> TableCSP:
    """Eliminate equalities ``x = y`` for the given pairs by merging variables."""
    uf = _UnionFind(nvars)
    for x, y in pairs:
        uf.union(x, y)
    roots = sorted({uf.find(x) for x in range(nvars)})
    index = {r: i for i, r in enumerate(roots)}
    cons = tuple((tuple(index[uf.find(x)] for x in s), t) for s, t in constraints)
    return TableCSP(domain, len(roots), cons)


def split_constants(instance: TableCSP) -> tuple[list[tuple[int, int]], list]:
    """Separate constant constraints (unary, one tuple) from the rest."""
    consts, rest = [], []
    for scope, table in instance.constraints:
        if len(scope) == 1 and len(table) == 1:
            consts.append((scope[0], next(iter(table))[0]))
        else:
            rest.append((scope, table))
    return consts, rest


def endomorphism_relation(h: Graph) -> frozenset:
    """``{(φ(0), ..., φ(n-1)) : φ an endomorphism of h}``."""
    return frozenset(iter_homs(h, h))


def constants_reduce(
    instance: TableCSP,
    h: Graph,
    p: int,
    oracle: Callable[[TableCSP], int] | None = None,
    transcript: TextIO | None = None,
) -> int:
    """Count solutions honoring constant constraints, mod ``p``, using only a constant-free oracle.

    Each pinned variable ``x = a`` is merged with a fresh variable ``v_a``;
    the ``v_a`` are tied together by the endomorphism relation of ``h``.
    Summing the resulting counts over partitions of ``V(h)`` with Möbius
    weights keeps only the assignments where ``a -> v_a`` is an
    automorphism, which overcounts the pinned count by ``|Aut(h)|``.
    This needs ``p`` not to divide ``|Aut(h)|``.

    Non-constant relations must be invariant under ``Aut(h)``. ``oracle``
    defaults to exact table-CSP counting mod ``p``; each call is logged
    as one JSON line to ``transcript``.
    """
    if instance.domain != h.n:
        raise ValueError("instance domain must be the vertex set of h")
    consts, rest = split_constants(instance)
    auts = automorphisms(h)
    order = len(auts)
    if order % p == 0:
        raise ValueError(f"h is not {p}-rigid (|Aut| = {order})")
    for scope, table in rest:
        for a in auts:
            if {tuple(a.mapping[x] for x in t) for t in table} != table:
                raise ValueError(f"relation on scope {scope} is not invariant under Aut(h)")
    if oracle is None:
        oracle = lambda csp: count_csp(csp, p)  # noqa: E731

    n0, k = instance.vars, h.n
    va = [n0 + a for a in range(k)]
    q = endomorphism_relation(h)
    cons = list(rest) + ([(tuple(va), q)] if k else [])
    base = [(x, va[a]) for x, a in consts]
    total = 0
    for call, theta in enumerate(enumerate_partitions(k, max_n=max(k, 10))):
        pairs = base + [(va[b[0]], va[c]) for b in theta.blocks for c in b[1:]]
        csp = _identify(n0 + k, k, cons, pairs)
        m = oracle(csp) % p
        if transcript is not None:
            transcript.write(
                json.dumps(
                    {"call": call, "theta": [list(b) for b in theta.blocks], "instance": csp.to_json(), "result": m},
                    sort_keys=True,
                )
                + "\n"
            )
        total = (total + mobius_weight(theta) * m) % p
    return total * pow(order, -1, p) % p


def count_with_constants(instance: TableCSP, p: int | None = None) -> int:
    """Direct count of an instance whose constant constraints are ordinary unary tables."""
    return count_csp(instance, p)


# ---------------------------------------------------------------------------
# modular gadgets


@dataclass(frozen=True)
class MppRelation:
    """Relation defined over ``h`` by a pinned gadget mod ``p``.

    ``counts`` holds the residue of the pinned count for every tuple.
    """

    arity: int
    tuples: frozenset
    strict: bool
    counts: tuple = ()


def mpp_eval(gadget: PinnedGraph, h: Graph, p: int) -> MppRelation:
    """Tuples whose pinned hom count is nonzero mod ``p``."""
    r = gadget.arity
    counts = []
    tuples = set()
    for a in product(range(h.n), repeat=r):
        c = count_hom_pinned(gadget, PinnedGraph(h, a), mod=p)
        counts.append((a, c))
        if c:
            tuples.add(a)
    strict = all(c == 1 for _, c in counts if c)
    return MppRelation(r, frozenset(tuples), strict, tuple(counts))


def support(gadget: PinnedGraph, h: Graph) -> frozenset:
    """Tuples with at least one pinned homomorphism (the pp-defined relation)."""
    return frozenset(
        a for a in product(range(h.n), repeat=gadget.arity) if count_hom_pinned(gadget, PinnedGraph(h, a))
    )


def strictify(gadget: PinnedGraph, p: int) -> PinnedGraph:
    """``(p-1)``-fold ⊙-power: nonzero counts become ≡ 1 by Fermat."""
    if p < 2:
        raise ValueError("p must be a prime")
    return odot_power(gadget, p - 1)


def power_pinned(h: Graph, columns: Sequence[Sequence[int]]) -> PinnedGraph:
    """``h^ℓ`` with pins ``a^j = (columns[0][j], ..., columns[ℓ-1][j])``."""
    if not columns:
        raise ValueError("need at least one tuple")
    out = PinnedGraph(h, tuple(columns[0]))
    for row in columns[1:]:
        out = product_pinned(out, PinnedGraph(h, tuple(row)))
    return out


def _partitions_by_rank(n: int) -> Iterator[Partition]:
    """Partitions of ``range(n)``, finest first (block count decreasing)."""

    def into(items, k):
        if k == 0:
            if not items:
                yield []
            return
        if len(items) < k:
            return
        first, rest = items[0], items[1:]
        for part in into(rest, k - 1):
            yield [[first]] + part
        for part in into(rest, k):
            for i in range(len(part)):
                yield part[:i] + [[first] + part[i]] + part[i + 1:]

    for k in range(n, 0, -1):
        for blocks in into(list(range(n)), k):
            yield Partition(n, tuple(tuple(b) for b in blocks))
    if n == 0:
        yield Partition(0)


def normalize_pp_gadget(
    gadget: PinnedGraph,
    h: Graph,
    p: int,
    relation: Iterable[Sequence[int]] | None = None,
    max_partitions: int = 20000,
) -> PinnedGraph:
    """Find a gadget defining the same relation with every count ≡ 1 (mod p).

    The relation ``R`` is the support of ``gadget`` unless given
    explicitly (it must then be that support). If the gadget's own counts
    on ``R`` are nonzero mod ``p`` it is simply strictified. Otherwise, following the product
    construction: take ``h^|R|`` pinned at the columns of ``R``, reduce it
    mod ``p`` keeping the pins, and look among its quotients for one whose
    support is exactly ``R`` and whose counts on ``R`` are all nonzero.
    That quotient, strictified, is returned.
    """
    if h.sorts is not None:
        raise SortError("gadget normalization works on unsorted targets")
    if not is_p_rigid(h, p):
        raise ValueError(f"h is not {p}-rigid")
    supp = support(gadget, h)
    rel = supp if relation is None else frozenset(tuple(t) for t in relation)
    if rel != supp:
        raise ValueError("gadget does not pp-define the given relation")
    if not rel:
        raise ValueError("the relation is empty")
    rows = sorted(rel)
    if all(count_hom_pinned(gadget, PinnedGraph(h, a), mod=p) for a in rows):
        return strictify(gadget, p)
    star = p_reduce_pinned(power_pinned(h, rows), p)
    for tried, theta in enumerate(_partitions_by_rank(star.graph.n)):
        if tried >= max_partitions:
            break
        cand = quotient_pinned(star, theta)
        if any(count_hom_pinned(cand, PinnedGraph(h, a), mod=p) == 0 for a in rows):
            continue
        if support(cand, h) != rel:
            continue
        return strictify(cand, p)
    raise SearchExhausted(f"no quotient among {tried + 1} partitions gives a normalized gadget")


def subalgebra_neighborhood(
    h: Graph, a_set: Iterable[int], witness: PinnedGraph, p: int
) -> tuple[frozenset, PinnedGraph]:
    """``N_h(A)`` together with a strict gadget defining it mod ``p``.

    ``witness`` must define ``A`` mod ``p``. The new gadget hangs a fresh
    pin off the strictified witness. Its count at ``b`` is ``|N(b) ∩ A|``
    mod ``p``; when that vanishes for some neighbor of ``A`` the edge step
    is normalized instead. Failure raises :class:`SearchExhausted`.
    """
    a_set = frozenset(a_set)
    rel = mpp_eval(witness, h, p)
    if witness.arity != 1 or rel.tuples != frozenset((a,) for a in a_set):
        raise ValueError("witness does not define the given set")
    target = neighborhood(h, a_set)
    strict = strictify(witness, p)
    g = strict.graph
    new = g.n
    x = strict.pins[0]
    sorts = None
    if g.sorts is not None:
        sorts = g.sorts + (("R" if g.sorts[x] == "L" else "L"),)
    step = PinnedGraph(Graph(new + 1, set(g.edges) | {(x, new)}, sorts), (new,))
    got = mpp_eval(step, h, p)
    want = frozenset((b,) for b in target)
    if got.tuples == want and got.strict:
        return target, step
    if got.tuples == want:
        return target, strictify(step, p)
    if h.sorts is None and is_p_rigid(h, p) and support(step, h) == want:
        return target, normalize_pp_gadget(step, h, p)
    raise SearchExhausted("could not build a gadget for the neighborhood")
