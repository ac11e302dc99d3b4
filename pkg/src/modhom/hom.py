"""Homomorphism counting, pinned variants and gadget combinators.

Counting is plain backtracking over the vertices of the source graph, with
candidate sets kept as bitmasks over the target. The last vertex of each
component is counted with a popcount instead of being enumerated.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .exceptions import SortError
from .graph import Graph, PinnedGraph, _bits, connected_components, mask_of


def _check_sorts(g: Graph, h: Graph) -> None:
    if (g.sorts is None) != (h.sorts is None):
        raise SortError("cannot count homomorphisms between a sorted and an unsorted graph")


def _base_domains(g: Graph, h: Graph) -> list[int]:
    full = (1 << h.n) - 1
    if g.sorts is None:
        return [full] * g.n
    side = {"L": h.side_mask("L"), "R": h.side_mask("R")}
    return [side[s] for s in g.sorts]


def _pin_domains(g: PinnedGraph, h: PinnedGraph) -> list[int] | None:
    """Candidate masks with pins applied, or None if two pins conflict."""
    if len(g.pins) != len(h.pins):
        raise ValueError(f"pin tuples differ in length ({len(g.pins)} vs {len(h.pins)})")
    _check_sorts(g.graph, h.graph)
    dom = _base_domains(g.graph, h.graph)
    for x, y in zip(g.pins, h.pins):
        dom[x] &= 1 << y
    if any(d == 0 for d in dom):
        return None
    return dom


def _order(g: Graph, comp: Iterable[int], dom: Sequence[int]) -> list[int]:
    """BFS order of a component from a pinned vertex, else a max-degree root."""
    comp = sorted(comp)
    pinned = [v for v in comp if dom[v] & (dom[v] - 1) == 0]
    root = pinned[0] if pinned else max(comp, key=lambda v: (g.degree(v), -v))
    order = [root]
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in sorted(g.nbrs[u], key=lambda w: (dom[w] & (dom[w] - 1) != 0, w)):
            if w not in seen:
                seen.add(w)
                order.append(w)
                queue.append(w)
    return order


def _plan(g: Graph, order: Sequence[int]):
    pos = {v: i for i, v in enumerate(order)}
    back = [tuple(u for u in g.nbrs[v] if u in pos and pos[u] < pos[v]) for v in order]
    loops = [g.has_loop(v) for v in order]
    return back, loops


@lru_cache(maxsize=4096)
def _schedule(g: Graph, fixed: frozenset, injective: bool) -> tuple:
    """Search plans per component; the order only depends on which vertices are fixed."""
    dom = [1 if v in fixed else 3 for v in range(g.n)]
    orders = [_order(g, c, dom) for c in connected_components(g)]
    if injective:
        # injectivity couples components, so run them as one search
        orders = [[v for o in orders for v in o]]
    return tuple((tuple(o),) + _plan(g, o) for o in orders)


def _count_ordered(g: Graph, h: Graph, plan, dom, mod, injective) -> int:
    """Number of (injective) maps of the planned vertices respecting ``dom``."""
    order, back, loops = plan
    n = len(order)
    if n == 0:
        return 1 % mod if mod else 1
    hadj = h.adj
    lmask = h.loop_mask
    img: dict[int, int] = {}

    def cands(i: int, used: int) -> int:
        v = order[i]
        m = dom[v]
        if loops[i]:
            m &= lmask
        for u in back[i]:
            m &= hadj[img[u]]
            if not m:
                return 0
        if injective:
            m &= ~used
        return m

    def rec(i: int, used: int) -> int:
        m = cands(i, used)
        if i == n - 1:
            return m.bit_count()
        total = 0
        v = order[i]
        while m:
            low = m & -m
            img[v] = low.bit_length() - 1
            total += rec(i + 1, used | low)
            m ^= low
        if mod:
            total %= mod
        return total

    return rec(0, 0) % mod if mod else rec(0, 0)


def _count(g: Graph, h: Graph, dom: list[int], mod: int | None = None, injective: bool = False) -> int:
    fixed = frozenset(v for v, d in enumerate(dom) if d & (d - 1) == 0)
    plans = _schedule(g, fixed, injective)
    if injective:
        return _count_ordered(g, h, plans[0], dom, mod, True)
    total = 1
    for plan in plans:
        total *= _count_ordered(g, h, plan, dom, mod, False)
        if mod:
            total %= mod
        if total == 0:
            return 0
    return total % mod if mod else total


def count_hom(g: Graph, h: Graph) -> int:
    """Number of homomorphisms ``g -> h`` (sort-preserving when both are sorted)."""
    _check_sorts(g, h)
    return _count(g, h, _base_domains(g, h))


def count_hom_mod(g: Graph, h: Graph, p: int) -> int:
    _check_sorts(g, h)
    return _count(g, h, _base_domains(g, h), mod=p)


def count_hom_pinned(g: PinnedGraph, h: PinnedGraph, mod: int | None = None) -> int:
    """Homomorphisms sending the i-th pin of ``g`` to the i-th pin of ``h``."""
    dom = _pin_domains(g, h)
    if dom is None:
        return 0
    return _count(g.graph, h.graph, dom, mod=mod)


def count_hom_pinned_set(g: PinnedGraph, h: Graph, targets: Sequence[Iterable[int]], mod: int | None = None) -> int:
    """Sum of pinned counts over all pin images drawn from ``targets``."""
    if len(targets) != len(g.pins):
        raise ValueError("need exactly one target set per pin")
    _check_sorts(g.graph, h)
    dom = _base_domains(g.graph, h)
    for x, t in zip(g.pins, targets):
        t = list(t)
        if any(not 0 <= y < h.n for y in t):
            raise ValueError("target vertex out of range")
        dom[x] &= mask_of(t)
    if any(d == 0 for d in dom):
        return 0
    return _count(g.graph, h, dom, mod=mod)


def count_inj(g: PinnedGraph | Graph, h: PinnedGraph | Graph) -> int:
    """Injective pinned homomorphisms; 0 when pin equality types differ."""
    if isinstance(g, Graph):
        g = PinnedGraph(g)
    if isinstance(h, Graph):
        h = PinnedGraph(h)
    if g.graph.n > h.graph.n:
        _pin_domains(g, h)  # still validate arity and sorts
        return 0
    dom = _pin_domains(g, h)
    if dom is None:
        return 0
    return _count(g.graph, h.graph, dom, injective=True)


def iter_homs(g: Graph, h: Graph, pins: Sequence[tuple[int, int]] = ()) -> Iterator[tuple[int, ...]]:
    """Enumerate homomorphisms as image tuples; ``pins`` lists forced (x, y) pairs."""
    _check_sorts(g, h)
    dom = _base_domains(g, h)
    for x, y in pins:
        dom[x] &= 1 << y
    if any(d == 0 for d in dom):
        return
    order = [v for c in connected_components(g) for v in _order(g, c, dom)]
    back, loops = _plan(g, order)
    img = [0] * g.n

    def rec(i: int):
        if i == len(order):
            yield tuple(img)
            return
        v = order[i]
        m = dom[v]
        if loops[i]:
            m &= h.loop_mask
        for u in back[i]:
            m &= h.adj[img[u]]
        for w in _bits(m):
            img[v] = w
            yield from rec(i + 1)

    yield from rec(0)


# ---------------------------------------------------------------------------
# gadget combinators


def equality_type(pins: Sequence[int]) -> tuple[int, ...]:
    """For each position, the first position holding the same vertex."""
    first: dict[int, int] = {}
    return tuple(first.setdefault(v, i) for i, v in enumerate(pins))


def glue_odot(a: PinnedGraph, b: PinnedGraph) -> PinnedGraph:
    """Disjoint union of ``a`` and ``b`` with matching pins identified."""
    if equality_type(a.pins) != equality_type(b.pins):
        raise ValueError("glue requires pin tuples of the same equality type")
    ga, gb = a.graph, b.graph
    if (ga.sorts is None) != (gb.sorts is None):
        raise SortError("cannot glue a sorted gadget to an unsorted one")
    index: dict[int, int] = {y: x for x, y in zip(a.pins, b.pins)}
    nxt = ga.n
    for v in range(gb.n):
        if v not in index:
            index[v] = nxt
            nxt += 1
    sorts = None
    if ga.sorts is not None:
        if any(ga.sorts[x] != gb.sorts[y] for x, y in zip(a.pins, b.pins)):
            raise SortError("glued pins carry different sorts")
        out = list(ga.sorts) + [None] * (nxt - ga.n)
        for v in range(gb.n):
            out[index[v]] = gb.sorts[v]
        sorts = tuple(out)
    edges = set(ga.edges) | {(index[u], index[v]) for u, v in gb.edges}
    return PinnedGraph(Graph(nxt, edges, sorts), a.pins)


def odot_power(a: PinnedGraph, k: int) -> PinnedGraph:
    """``a ⊙ a ⊙ ... ⊙ a`` with ``k >= 1`` copies."""
    if k < 1:
        raise ValueError("power must be at least 1")
    out = a
    for _ in range(k - 1):
        out = glue_odot(out, a)
    return out


def product_pinned(a: PinnedGraph, b: PinnedGraph) -> PinnedGraph:
    """Direct product with pins paired coordinatewise; ``(x, y)`` is vertex ``x*|b|+y``.

    The result is unsorted.
    """
    if len(a.pins) != len(b.pins):
        raise ValueError("pin tuples differ in length")
    ga, gb = a.graph, b.graph
    nb = gb.n
    edges = set()
    for u, v in ga.edges:
        for x, y in gb.edges:
            edges.add((u * nb + x, v * nb + y))
            edges.add((u * nb + y, v * nb + x))
    pins = tuple(x * nb + y for x, y in zip(a.pins, b.pins))
    return PinnedGraph(Graph(ga.n * nb, edges), pins)


# ---------------------------------------------------------------------------
# table constraints


@dataclass(frozen=True)
class TableCSP:
    """Variables ``0..vars-1`` over values ``0..domain-1`` with explicit tables."""

    domain: int
    vars: int
    constraints: tuple = field(default=())

    def __post_init__(self):
        if self.domain < 0 or self.vars < 0:
            raise ValueError("domain and variable counts must be nonnegative")
        cons = []
        for scope, tuples in self.constraints:
            scope = tuple(int(x) for x in scope)
            if any(not 0 <= x < self.vars for x in scope):
                raise ValueError(f"constraint scope {scope} out of range")
            table = frozenset(tuple(int(a) for a in t) for t in tuples)
            for t in table:
                if len(t) != len(scope):
                    raise ValueError(f"tuple {t} does not match scope arity {len(scope)}")
                if any(not 0 <= a < self.domain for a in t):
                    raise ValueError(f"tuple {t} has values outside the domain")
            cons.append((scope, table))
        object.__setattr__(self, "constraints", tuple(cons))

    def to_json(self) -> dict:
        return {
            "domain": self.domain,
            "vars": self.vars,
            "constraints": [
                {"scope": list(s), "tuples": [list(t) for t in sorted(tb)]} for s, tb in self.constraints
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "TableCSP":
        if not isinstance(obj, dict) or not {"domain", "vars"} <= set(obj):
            raise ValueError("TableCSP JSON needs 'domain' and 'vars'")
        cons = []
        for c in obj.get("constraints", []):
            if not isinstance(c, dict) or "scope" not in c or "tuples" not in c:
                raise ValueError("each constraint needs 'scope' and 'tuples'")
            cons.append((c["scope"], c["tuples"]))
        return cls(int(obj["domain"]), int(obj["vars"]), tuple(cons))


def count_csp(instance: TableCSP, p: int | None = None) -> int:
    """Number of satisfying assignments (mod ``p`` if given), by backtracking.

    Variables are assigned in index order and a constraint is checked as
    soon as its scope is fully assigned.
    """
    nv, d = instance.vars, instance.domain
    if any(len(t) == 0 for _, t in instance.constraints):
        return 0
    by_last: list[list] = [[] for _ in range(nv)]
    for scope, table in instance.constraints:
        if not scope:
            continue
        by_last[max(scope)].append((scope, table))
    val = [0] * nv

    def rec(i: int) -> int:
        if i == nv:
            return 1
        total = 0
        for a in range(d):
            val[i] = a
            if all(tuple(val[x] for x in s) in t for s, t in by_last[i]):
                total += rec(i + 1)
        if p:
            total %= p
        return total

    res = rec(0)
    return res % p if p else res


def graph_to_csp(g: Graph, h: Graph) -> TableCSP:
    """Encode ``Hom(g, h)`` as a table CSP over ``V(h)``."""
    _check_sorts(g, h)
    arcs = [(u, v) for u, v in h.edges] + [(v, u) for u, v in h.edges if u != v]
    loops = [(v,) for v in range(h.n) if h.has_loop(v)]
    cons = []
    for u, v in sorted(g.edges):
        cons.append(((u,), loops) if u == v else ((u, v), arcs))
    if g.sorts is not None:
        for v in range(g.n):
            cons.append(((v,), [(w,) for w in h.side(g.sorts[v])]))
    return TableCSP(h.n, g.n, tuple(cons))
