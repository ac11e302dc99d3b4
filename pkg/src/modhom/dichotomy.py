"""Tractability classification mod p and the reduction from weighted #BIS.

After p-reduction, counting homomorphisms to h mod p is easy exactly when
every component of the reduced target is an isolated vertex, a reflexive
clique or a complete bipartite graph. Otherwise an induced thick Z-graph
encodes independent sets; :func:`build_bis_reduction` and
:func:`verify_reduction` construct and check that encoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .exceptions import SortError
from .graph import (
    COMPLETE_BIPARTITE,
    ISOLATED_VERTEX,
    OTHER,
    REFLEXIVE_CLIQUE,
    L,
    R,
    Graph,
    PinnedGraph,
    bipartition,
    connected_components,
    graph_to_json,
    induced_subgraph,
    is_connected,
    mask_of,
    structural_class,
)
from .hom import count_hom_mod, count_hom_pinned_set, iter_homs
from .iso import canonical_key, iso_classes
from .reduction import p_reduce

TRACTABLE = "tractable"
HARD = "hard"


@dataclass(frozen=True)
class ClassifierVerdict:
    """``witness`` lists ``(component vertices, class)`` pairs of the reduced target.

    For a tractable verdict every component is listed; for a hard one only
    the first offending component.
    """

    reduced_target: Graph
    verdict: str
    witness: tuple


def classify(h: Graph, p: int) -> ClassifierVerdict:
    red = p_reduce(h, p)
    comps = []
    for comp in connected_components(red):
        sub = induced_subgraph(red, comp)
        cls = structural_class(sub)
        if cls == OTHER:
            return ClassifierVerdict(red, HARD, ((frozenset(comp), cls),))
        _check_rigid_shape(sub, cls, p)
        comps.append((frozenset(comp), cls))
    return ClassifierVerdict(red, TRACTABLE, tuple(comps))


def _check_rigid_shape(sub: Graph, cls: str, p: int) -> None:
    # a p-rigid target cannot contain p interchangeable vertices
    if cls == REFLEXIVE_CLIQUE and sub.n >= p:
        raise AssertionError(f"reflexive clique on {sub.n} vertices survived {p}-reduction")
    if cls == COMPLETE_BIPARTITE:
        sides = bipartition(sub)
        left = sum(1 for s in sides if s == L)
        if left >= p or sub.n - left >= p:
            raise AssertionError("complete bipartite side of size >= p survived reduction")


def _component_count(gi: Graph, hj: Graph, cls: str) -> int:
    """Homomorphisms from a connected ``gi`` to a connected tractable ``hj``."""
    if cls == ISOLATED_VERTEX:
        if gi.edges:
            return 0
        if gi.sorts is not None and gi.sorts[0] != hj.sorts[0]:
            return 0
        return 1
    if cls == REFLEXIVE_CLIQUE:
        return hj.n ** gi.n
    # complete bipartite
    if gi.sorts is not None:
        a, b = len(hj.left), len(hj.right)
        return a ** len(gi.left) * b ** len(gi.right)
    sides = bipartition(gi)
    if sides is None:
        return 0
    l = sum(1 for s in sides if s == L)
    r = gi.n - l
    hs = bipartition(hj)
    a = sum(1 for s in hs if s == L)
    b = hj.n - a
    return a ** l * b ** r + a ** r * b ** l


def count_tractable(g: Graph, h: Graph) -> int:
    """Exact ``hom(g, h)`` for targets whose components are all tractable shapes.

    Multiplies, over the components of ``g``, the sum over components of
    ``h`` of closed-form counts.
    """
    if (g.sorts is None) != (h.sorts is None):
        raise SortError("cannot count homomorphisms between a sorted and an unsorted graph")
    targets = []
    for comp in connected_components(h):
        hj = induced_subgraph(h, comp)
        cls = structural_class(hj)
        if cls == OTHER:
            raise ValueError("target has a component that is not a tractable shape")
        targets.append((hj, cls))
    total = 1
    for comp in connected_components(g):
        gi = induced_subgraph(g, comp)
        total *= sum(_component_count(gi, hj, cls) for hj, cls in targets)
        if total == 0:
            return 0
    return total


# ---------------------------------------------------------------------------
# thick Z-graphs


def is_thick_z(h: Graph, a, b, c, d) -> bool:
    """Check parts ``A, C ⊆ L`` and ``B, D ⊆ R`` against the thick Z-graph shape."""
    a, b, c, d = map(frozenset, (a, b, c, d))
    if not (a and b and c and d):
        return False
    if h.sorts is None:
        return False
    if any(h.sorts[v] != L for v in a | c) or any(h.sorts[v] != R for v in b | d):
        return False
    if len(a | b | c | d) != len(a) + len(b) + len(c) + len(d):
        return False
    for x, y in ((a, b), (c, b), (c, d)):
        if any(not h.has_edge(u, v) for u in x for v in y):
            return False
    return not any(h.has_edge(u, v) for u in a for v in d)


def _complete_bipartite_on(h: Graph, verts) -> bool:
    left = [v for v in verts if h.sorts[v] == L]
    right = [v for v in verts if h.sorts[v] == R]
    return all(h.has_edge(u, v) for u in left for v in right)


def _spanning_z(h: Graph, verts):
    """A thick Z partition using every vertex of ``verts``, if one exists."""
    left = sorted(v for v in verts if h.sorts[v] == L)
    right = sorted(v for v in verts if h.sorts[v] == R)
    lmask = mask_of(left)
    for bits in range(1, (1 << len(left)) - 1):
        a = frozenset(v for i, v in enumerate(left) if bits >> i & 1)
        c = frozenset(left) - a
        cmask, b, d = mask_of(c), set(), set()
        for r in right:
            nb = h.adj[r] & lmask
            if nb == lmask:
                b.add(r)
            elif nb == cmask:
                d.add(r)
            else:
                break
        else:
            if b and d:
                return a, frozenset(b), c, frozenset(d)
    return None


def _exhaustive_z(h: Graph, verts):
    """Search every induced thick Z-subgraph inside ``verts``.

    For each choice of ``A, C`` the largest admissible ``B, D`` are used.
    """
    left = sorted(v for v in verts if h.sorts[v] == L)
    right = sorted(v for v in verts if h.sorts[v] == R)
    for lab in product((0, 1, 2), repeat=len(left)):
        a = frozenset(v for v, t in zip(left, lab) if t == 1)
        c = frozenset(v for v, t in zip(left, lab) if t == 2)
        if not a or not c:
            continue
        ac = a | c
        b = frozenset(r for r in right if all(h.has_edge(u, r) for u in ac))
        d = frozenset(
            r for r in right if all(h.has_edge(u, r) for u in c) and not any(h.has_edge(u, r) for u in a)
        )
        if b and d and is_thick_z(h, a, b, c, d):
            return a, b, c, d
    return None


def find_thick_z(h: Graph, exhaustive_limit: int = 10):
    """Parts ``(A, B, C, D)`` of an induced thick Z-subgraph, or None if ``h`` is complete bipartite.

    Descends as in the existence argument: while no spanning Z fits,
    pick ``v, w`` on one side with ``∅ ≠ N(v) ∩ N(w) ≠ N(v)`` and
    ``N(v)`` not the whole other side, and shrink to ``N(N(v)) ∪ N(v)``.
    When no such pair helps, fall back to exhaustive search.
    """
    if h.sorts is None:
        raise SortError("find_thick_z needs a sorted graph")
    if not is_connected(h):
        raise ValueError("find_thick_z needs a connected graph")
    verts = frozenset(range(h.n))
    if _complete_bipartite_on(h, verts):
        return None
    while True:
        z = _spanning_z(h, verts)
        if z is not None:
            return z
        vmask = mask_of(verts)
        nxt = None
        for v in sorted(verts):
            nv = h.adj[v] & vmask
            other = mask_of(u for u in verts if h.sorts[u] != h.sorts[v])
            if nv == other:
                continue
            for w in sorted(verts):
                if w == v or h.sorts[w] != h.sorts[v]:
                    continue
                common = nv & h.adj[w]
                if common and common != nv:
                    rp = frozenset(u for u in verts if nv >> u & 1)
                    lp = frozenset(u for u in verts if any(h.adj[x] >> u & 1 for x in rp))
                    cand = rp | lp
                    if cand != verts and not _complete_bipartite_on(h, cand):
                        nxt = cand
                        break
            if nxt is not None:
                break
        if nxt is None:
            break
        verts = nxt
    if len(verts) <= exhaustive_limit or h.n <= exhaustive_limit:
        z = _exhaustive_z(h, verts) or _exhaustive_z(h, frozenset(range(h.n)))
        return z
    return _exhaustive_z(h, frozenset(range(h.n)))


@dataclass(frozen=True)
class ZDecomposition:
    a: frozenset
    b: frozenset
    c: frozenset
    d: frozenset
    gadget_l: PinnedGraph
    gadget_r: PinnedGraph
    alpha1: int
    alpha2: int
    beta1: int
    beta2: int
    p: int

    @property
    def parts(self):
        return self.a, self.b, self.c, self.d


def single_vertex_gadget(side: str) -> PinnedGraph:
    return PinnedGraph(Graph(1, (), (side,)), (0,))


def _gadget_params(h: Graph, gadget: PinnedGraph, first, second, outside, p: int):
    """``(count on first, count on second)`` mod p if the gadget qualifies, else None."""
    x1 = count_hom_pinned_set(gadget, h, [first], mod=p)
    x2 = count_hom_pinned_set(gadget, h, [second], mod=p)
    if not x1 or not x2:
        return None
    for v in outside:
        if count_hom_pinned_set(gadget, h, [[v]], mod=p):
            return None
    return x1, x2


def make_decomposition(h: Graph, parts, gadget_l: PinnedGraph, gadget_r: PinnedGraph, p: int) -> ZDecomposition:
    """Validate parts and gadgets and compute the parameters."""
    a, b, c, d = map(frozenset, parts)
    if not is_thick_z(h, a, b, c, d):
        raise ValueError("parts do not form an induced thick Z-subgraph")
    for gad, side in ((gadget_l, L), (gadget_r, R)):
        if gad.arity != 1 or gad.graph.sorts is None or gad.graph.sorts[gad.pins[0]] != side:
            raise ValueError(f"gadget for side {side} must be sorted with one pin of that sort")
    out_l = [v for v in h.left if v not in a | c]
    out_r = [v for v in h.right if v not in b | d]
    al = _gadget_params(h, gadget_l, sorted(a), sorted(c), out_l, p)
    be = _gadget_params(h, gadget_r, sorted(d), sorted(b), out_r, p)
    if al is None or be is None:
        raise ValueError("gadgets violate the soundness or completeness congruences")
    return ZDecomposition(a, b, c, d, gadget_l, gadget_r, al[0], al[1], be[0], be[1], p)


def _gadget_candidates(side: str, bound: int):
    seen = set()
    for k in range(1, bound + 1):
        cands = []
        for base in iso_classes(k, loops=False):
            if not is_connected(base) or bipartition(base) is None:
                continue
            s = bipartition(base)
            for sorts in (s, tuple(L if x == R else R for x in s)):
                g = base.with_sorts(sorts)
                cands.append((canonical_key(g), g))
        cands.sort(key=lambda t: t[0])
        for key, g in cands:
            if key in seen:
                continue
            seen.add(key)
            for x in range(g.n):
                if g.sorts[x] == side:
                    yield PinnedGraph(g, (x,))


def find_gadgets(h: Graph, z, p: int, bound: int) -> ZDecomposition | None:
    """Smallest gadgets (up to ``bound`` vertices) making the Z-subgraph non-degenerate.

    Candidates are connected sorted pinned graphs in order of vertex
    count, edge count and canonical code. None means the bounded search
    failed, which does not rule out larger gadgets.
    """
    if h.sorts is None:
        raise SortError("find_gadgets needs a sorted graph")
    a, b, c, d = map(frozenset, z)
    if not is_thick_z(h, a, b, c, d):
        raise ValueError("parts do not form an induced thick Z-subgraph")
    out_l = [v for v in h.left if v not in a | c]
    out_r = [v for v in h.right if v not in b | d]
    found = {}
    for side, first, second, outside in ((L, a, c, out_l), (R, d, b, out_r)):
        for gad in _gadget_candidates(side, bound):
            params = _gadget_params(h, gad, sorted(first), sorted(second), outside, p)
            if params is not None:
                found[side] = (gad, params)
                break
        else:
            return None
    (gl, (a1, a2)), (gr, (b1, b2)) = found[L], found[R]
    return ZDecomposition(a, b, c, d, gl, gr, a1, a2, b1, b2, p)


# ---------------------------------------------------------------------------
# weighted independent sets and the reduction


def zbis_value(g: Graph, alpha: int, beta: int, p: int | None = None) -> int:
    """``Σ_I α^{|I∩L|} β^{|I∩R|}`` over independent sets ``I`` of ``g`` (mod ``p`` if given)."""
    if g.sorts is None:
        raise SortError("zbis_value needs a sorted graph")
    if (p and (alpha % p == 0 or beta % p == 0)) or alpha == 0 or beta == 0:
        raise ValueError("weights must be nonzero")
    weight = [alpha if s == L else beta for s in g.sorts]
    adj = g.adj

    def rec(v: int, banned: int) -> int:
        if v == g.n:
            return 1
        total = rec(v + 1, banned)
        if not banned >> v & 1:
            total += weight[v] * rec(v + 1, banned | adj[v])
        return total % p if p else total

    return rec(0, 0)


def build_bis_reduction(g: Graph, h: Graph, z: ZDecomposition) -> Graph:
    """The instance ``G'``: ``g`` itself with a gadget copy glued at every vertex.

    Vertex ``v`` of ``g`` keeps index ``v``; copies of the gadgets'
    other vertices follow in vertex order of ``g``.
    """
    if g.sorts is None or h.sorts is None:
        raise SortError("build_bis_reduction needs sorted graphs")
    if not is_thick_z(h, *z.parts):
        raise ValueError("invalid decomposition")
    edges = set(g.edges)
    sorts = list(g.sorts)
    nxt = g.n
    for v in range(g.n):
        gad = z.gadget_l if g.sorts[v] == L else z.gadget_r
        x = gad.pins[0]
        index = {x: v}
        for u in range(gad.graph.n):
            if u != x:
                index[u] = nxt
                sorts.append(gad.graph.sorts[u])
                nxt += 1
        edges |= {(index[s], index[t]) for s, t in gad.graph.edges}
    return Graph(nxt, edges, tuple(sorts))


@dataclass
class BisReport:
    lhs: int
    rhs: int
    p: int
    equal: bool
    g: Graph
    G_prime: Graph
    debug: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "p": self.p,
            "equal": self.equal,
            "g": graph_to_json(self.g),
            "G_prime": graph_to_json(self.G_prime),
        }


def verify_reduction(g: Graph, h: Graph, z: ZDecomposition, p: int, debug: bool = False) -> BisReport:
    """Compare ``hom(G', h) mod p`` with ``α₂^|L| β₂^|R| Z_{α₁/α₂, β₁/β₂}(g) mod p``.

    With ``debug`` (small ``g`` only) the homomorphisms are also grouped
    by the independent set they encode, and each group size is checked
    against its predicted residue. Homomorphisms with some vertex of ``g``
    mapped outside ``A∪C`` / ``B∪D`` are counted separately and must sum
    to 0 mod p.
    """
    gp = build_bis_reduction(g, h, z)
    lhs = count_hom_mod(gp, h, p)
    a = z.alpha1 * pow(z.alpha2, -1, p) % p
    b = z.beta1 * pow(z.beta2, -1, p) % p
    nl, nr = len(g.left), len(g.right)
    rhs = pow(z.alpha2, nl, p) * pow(z.beta2, nr, p) * zbis_value(g, a, b, p) % p
    report = BisReport(lhs, rhs, p, lhs == rhs, g, gp)
    if debug:
        report.debug = _debug_classes(g, h, z, gp, p)
        if not report.debug["ok"]:
            report.equal = False
    return report


def _debug_classes(g: Graph, h: Graph, z: ZDecomposition, gp: Graph, p: int) -> dict:
    if g.n > 5:
        raise ValueError("debug mode is limited to instances with at most 5 vertices")
    classes: dict[frozenset, int] = {}
    outside = 0
    for phi in iter_homs(gp, h):
        inside = all(
            phi[v] in (z.a | z.c if g.sorts[v] == L else z.b | z.d) for v in range(g.n)
        )
        if not inside:
            outside += 1
            continue
        key = frozenset(v for v in range(g.n) if phi[v] in (z.a if g.sorts[v] == L else z.d))
        classes[key] = classes.get(key, 0) + 1
    ind = set()
    for mask in range(1 << g.n):
        vs = [v for v in range(g.n) if mask >> v & 1]
        if all(not (mask >> u & 1 and mask >> w & 1) for u, w in g.edges):
            ind.add(frozenset(vs))
    ok = set(classes) == ind and outside % p == 0
    for key, size in classes.items():
        want = 1
        for v in range(g.n):
            if g.sorts[v] == L:
                want *= z.alpha1 if v in key else z.alpha2
            else:
                want *= z.beta1 if v in key else z.beta2
        if size % p != want % p:
            ok = False
    return {"ok": ok, "outside": outside, "classes": {tuple(sorted(k)): s for k, s in classes.items()}}
