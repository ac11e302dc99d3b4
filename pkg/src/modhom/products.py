"""Graph products, Cartesian skeletons and prime factorization.

Product vertices are indexed lexicographically: in ``a ⊗ b`` the pair
``(x, y)`` gets index ``x * b.n + y``, except in the bipartite diamond
product where only same-sort pairs exist and the index is the position in
:func:`diamond_labels`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Sequence

from .exceptions import SortError
from .graph import (
    L,
    R,
    Graph,
    Partition,
    bipartition,
    connected_components,
    induced_subgraph,
    is_connected,
    quotient,
    r_classes,
    sorted_by_bipartition,
)
from .iso import canonical_form, canonical_graph, canonical_key, find_isomorphism, iso_classes, iter_automorphisms

DIRECT = "direct"
CARTESIAN = "cartesian"
DIAMOND = "diamond"


def direct_product(a: Graph, b: Graph) -> Graph:
    nb = b.n
    edges = set()
    for u, v in a.edges:
        for x, y in b.edges:
            edges.add((u * nb + x, v * nb + y))
            edges.add((u * nb + y, v * nb + x))
    return Graph(a.n * nb, edges)


def cartesian_product(a: Graph, b: Graph) -> Graph:
    nb = b.n
    edges = set()
    for u, v in a.edges:
        for y in range(nb):
            edges.add((u * nb + y, v * nb + y))
    for x in range(a.n):
        for u, v in b.edges:
            edges.add((x * nb + u, x * nb + v))
    return Graph(a.n * nb, edges)


def _bipartite(g: Graph) -> bool:
    if g.is_sorted:
        return True
    if bipartition(g) is not None:
        raise SortError("bipartite factors of a diamond product must carry sorts")
    return False


def diamond_labels(a: Graph, b: Graph) -> list[tuple[int, int]]:
    """Coordinate pair of every vertex of ``diamond_product(a, b)``."""
    if _bipartite(a) and _bipartite(b):
        return [(x, y) for x in range(a.n) for y in range(b.n) if a.sorts[x] == b.sorts[y]]
    return [(x, y) for x in range(a.n) for y in range(b.n)]


def diamond_product(a: Graph, b: Graph) -> Graph:
    """The diamond product.

    Two bipartite (sorted) factors: vertices ``L×L ∪ R×R``, sorted.
    One bipartite factor: all pairs, sorted by the bipartite coordinate.
    No bipartite factor: the direct product.
    Edges always follow the direct-product rule.
    """
    ba, bb = _bipartite(a), _bipartite(b)
    if not ba and not bb:
        return direct_product(a, b)
    labels = diamond_labels(a, b)
    index = {xy: i for i, xy in enumerate(labels)}
    edges = set()
    for u, v in a.edges:
        for x, y in b.edges:
            for s, t in (((u, x), (v, y)), ((u, y), (v, x))):
                if s in index and t in index:
                    edges.add((index[s], index[t]))
    if ba and bb:
        sorts = tuple(a.sorts[x] for x, _ in labels)
    elif ba:
        sorts = tuple(a.sorts[x] for x, _ in labels)
    else:
        sorts = tuple(b.sorts[y] for _, y in labels)
    return Graph(len(labels), edges, sorts)


def diamond_power(h: Graph, k: int) -> tuple[Graph, list[tuple[int, ...]]]:
    """``h^{⋄k}`` and the coordinate tuple of each of its vertices."""
    if k < 1:
        raise ValueError("power must be at least 1")
    g, labels = h, [(v,) for v in range(h.n)]
    for _ in range(k - 1):
        pairs = diamond_labels(g, h)
        g = diamond_product(g, h)
        labels = [labels[x] + (y,) for x, y in pairs]
    return g, labels


def boolean_square(g: Graph) -> Graph:
    """Join ``x, y`` (possibly equal) whenever they share a neighbor."""
    adj = g.adj
    edges = [(x, y) for x in range(g.n) for y in range(x, g.n) if adj[x] & adj[y]]
    return Graph(g.n, edges)


def _strict(a: int, b: int) -> bool:
    """Bitmask ``a`` is a proper subset of ``b``."""
    return a != b and a & b == a


def dispensable(g: Graph, x: int, y: int) -> bool:
    """Whether the edge ``xy`` of the Boolean square may be dropped from the skeleton."""
    if x == y:
        return True
    nx, ny = g.adj[x], g.adj[y]
    for z in range(g.n):
        nz = g.adj[z]
        c1 = _strict(nx & ny, nx & nz) or (_strict(nx, nz) and _strict(nz, ny))
        if not c1:
            continue
        c2 = _strict(ny & nx, ny & nz) or (_strict(ny, nz) and _strict(nz, nx))
        if c2:
            return True
    return False


def cartesian_skeleton(g: Graph) -> Graph:
    sq = boolean_square(g)
    return Graph(g.n, [(x, y) for x, y in sq.edges if not dispensable(g, x, y)])


def skeleton_components(g: Graph) -> tuple[Graph, Graph]:
    """``(S_L, S_R)``: the skeleton restricted to each side, vertices in index order."""
    if g.sorts is None:
        raise SortError("skeleton_components needs a sorted graph")
    if not is_connected(g):
        raise ValueError("skeleton_components needs a connected graph")
    s = cartesian_skeleton(g)
    return induced_subgraph(s, g.left), induced_subgraph(s, g.right)


def r_quotient(g: Graph) -> tuple[Graph, Partition]:
    """``g/R`` together with the R-class partition."""
    part = r_classes(g)
    return quotient(g, part), part


def local_reduction(g: Graph, p: int) -> tuple[Graph, list[int]]:
    """Drop ``a·p`` vertices from every R-class of size ``a·p + r``.

    The highest-indexed members of each class go. Returns the induced
    subgraph and the kept original vertices.
    """
    drop = set()
    for blk in r_classes(g).blocks:
        k = len(blk) - len(blk) % p
        drop.update(blk[len(blk) - k:])
    kept = [v for v in range(g.n) if v not in drop]
    return induced_subgraph(g, kept), kept


def disjoint_sum(a: Graph, b: Graph) -> Graph:
    n = a.n
    return Graph(a.n + b.n, set(a.edges) | {(u + n, v + n) for u, v in b.edges})


def skeleton_formula(a: Graph, b: Graph) -> Graph:
    """The predicted skeleton of ``a ⋄ b`` for R-thin connected factors."""
    ba, bb = _bipartite(a), _bipartite(b)
    if ba and bb:
        al, ar = skeleton_components(a)
        bl, br = skeleton_components(b)
        return disjoint_sum(cartesian_product(al, bl), cartesian_product(ar, br))
    if ba:
        al, ar = skeleton_components(a)
        sb = cartesian_skeleton(b)
        return disjoint_sum(cartesian_product(al, sb), cartesian_product(ar, sb))
    if bb:
        sa = cartesian_skeleton(a)
        bl, br = skeleton_components(b)
        return disjoint_sum(cartesian_product(sa, bl), cartesian_product(sa, br))
    return cartesian_product(cartesian_skeleton(a), cartesian_skeleton(b))


# ---------------------------------------------------------------------------
# factorization


@dataclass(frozen=True)
class Factorization:
    """``product(factors).relabel(witness) == graph`` for the given product kind."""

    factors: tuple
    kind: str
    witness: tuple

    def product(self) -> Graph:
        mul = cartesian_product if self.kind == CARTESIAN else diamond_product
        out = self.factors[0]
        for f in self.factors[1:]:
            out = mul(out, f)
        return out

    def reproduces(self, g: Graph) -> bool:
        return self.product().relabel(self.witness) == g


@lru_cache(maxsize=None)
def _connected_classes(n: int, loops: bool) -> tuple[Graph, ...]:
    return tuple(c for c in iso_classes(n, loops=loops) if n > 0 and is_connected(c))


def _finish(g: Graph, factors: list[Graph], kind: str) -> Factorization:
    factors = sorted(factors, key=canonical_key)
    fac = Factorization(tuple(factors), kind, ())
    w = find_isomorphism(fac.product(), g)
    if w is None and g.sorts is not None:
        # the product may come out with its sides swapped; flip every sorted factor
        factors = [f.with_sorts([L if s == R else R for s in f.sorts]) if f.sorts else f for f in factors]
        fac = Factorization(tuple(factors), kind, ())
        w = find_isomorphism(fac.product(), g)
    if w is None:
        raise AssertionError("factors do not multiply back to the input")
    return Factorization(tuple(factors), kind, w)


def _cartesian_split(g: Graph) -> tuple[Graph, Graph] | None:
    n, m = g.n, len(g.edges)
    key = canonical_form(g)
    for a in range(2, n // 2 + 1):
        if n % a:
            continue
        b = n // a
        for fa in _connected_classes(a, False):
            ea = len(fa.edges)
            rest = m - ea * b
            if rest < 0 or rest % a:
                continue
            eb = rest // a
            for fb in _connected_classes(b, False):
                if len(fb.edges) == eb and canonical_form(cartesian_product(fa, fb)) == key:
                    return fa, fb
    return None


def cartesian_prime_factorization(g: Graph) -> Factorization:
    """Factor a connected loopless graph into Cartesian-prime factors."""
    if g.loop_mask:
        raise ValueError("Cartesian factorization is defined here for loopless graphs")
    if g.n == 0 or not is_connected(g):
        raise ValueError("Cartesian factorization needs a connected, nonempty graph")
    base = g.unsorted()

    def split(h: Graph) -> list[Graph]:
        parts = _cartesian_split(h)
        if parts is None:
            return [canonical_graph(h)]
        return split(parts[0]) + split(parts[1])

    return _finish(base, split(base), CARTESIAN)


def _is_unit(h: Graph) -> bool:
    """The diamond units: a single edge, or one looped vertex."""
    return (h.n == 2 and h.edges == {(0, 1)}) or (h.n == 1 and h.loop_mask == 1)


def _arcs(h: Graph) -> int:
    return sum(1 if u == v else 2 for u, v in h.edges)


def _degree_profile(h: Graph) -> tuple:
    return tuple(sorted((h.sorts[v] if h.sorts else "", h.degree(v)) for v in range(h.n)))


def _orientations(h: Graph) -> list[Graph]:
    """Both sortings of a connected bipartite graph, deduplicated."""
    s = bipartition(h)
    out = {}
    for sorts in (s, tuple(L if x == R else R for x in s)):
        g = h.with_sorts(sorts)
        out.setdefault(canonical_form(g), g)
    return list(out.values())


def _sorted_frames(nl: int, nr: int, e: int):
    """All sorted bipartite graphs with the given side sizes and edge count."""
    sorts = (L,) * nl + (R,) * nr
    slots = [(u, nl + v) for u in range(nl) for v in range(nr)]
    for chosen in combinations(slots, e):
        yield Graph(nl + nr, chosen, sorts)


def _diamond_split(g: Graph) -> tuple[Graph, Graph] | None:
    n, key, prof = g.n, canonical_form(g), _degree_profile(g)
    if g.sorts is None:
        arcs = _arcs(g)
        for a in range(2, int(n ** 0.5) + 1):
            if n % a:
                continue
            for fa in _connected_classes(a, False):
                if bipartition(fa) is not None or _is_unit(fa) or arcs % _arcs(fa):
                    continue
                for fb in _connected_classes(n // a, False):
                    if bipartition(fb) is not None or _is_unit(fb) or _arcs(fb) * _arcs(fa) != arcs:
                        continue
                    if canonical_form(direct_product(fa, fb)) == key:
                        return fa, fb
        return None
    nl, nr, m = len(g.left), len(g.right), len(g.edges)
    # one non-bipartite factor
    for a in range(2, n // 3 + 1):
        if nl % a or nr % a:
            continue
        for fa in _connected_classes(a, False):
            if bipartition(fa) is not None or _is_unit(fa):
                continue
            wa = _arcs(fa)
            if m % wa:
                continue
            for fb in _sorted_frames(nl // a, nr // a, m // wa):
                if _is_unit(fb.unsorted()) or not is_connected(fb):
                    continue
                prod = diamond_product(fa, fb)
                if _degree_profile(prod) == prof and canonical_form(prod) == key:
                    return fa, fb
    # two bipartite factors; the smaller has at most (n + 2) / 2 vertices
    for a in range(3, (n + 2) // 2 + 1):
        for base in _connected_classes(a, False):
            if bipartition(base) is None:
                continue
            for fa in _orientations(base):
                la, ra, ea = len(fa.left), len(fa.right), len(fa.edges)
                if nl % la or nr % ra or m % ea:
                    continue
                lb, rb = nl // la, nr // ra
                if lb + rb < 3:
                    continue
                for fb in _sorted_frames(lb, rb, m // ea):
                    if not is_connected(fb):
                        continue
                    prod = diamond_product(fa, fb)
                    if _degree_profile(prod) == prof and canonical_form(prod) == key:
                        return fa, canonical_graph(fb)
    return None


def diamond_prime_factorization(g: Graph) -> Factorization:
    """Factor a connected graph into diamond-prime factors.

    Bipartite inputs are sorted by their canonical bipartition if they
    arrive unsorted. A single edge or a looped vertex is a unit and is
    its own factorization.
    """
    if g.n == 0 or not is_connected(g):
        raise ValueError("diamond factorization needs a connected, nonempty graph")
    if g.sorts is None and bipartition(g) is not None:
        g = sorted_by_bipartition(g)

    def split(h: Graph) -> list[Graph]:
        if _is_unit(h.unsorted()):
            return [canonical_graph(h)]
        parts = _diamond_split(h)
        if parts is None:
            return [canonical_graph(h)]
        return split(parts[0]) + split(parts[1])

    return _finish(g, split(g), DIAMOND)


# ---------------------------------------------------------------------------
# automorphisms of diamond powers


@dataclass(frozen=True)
class SplittingReport:
    automorphisms: int
    failures: tuple


def _class_coordinates(h: Graph, k: int):
    """The quotient ``h^{⋄k}/R`` with every class named by factor R-classes."""
    prod, labels = diamond_power(h, k)
    q, part = r_quotient(prod)
    hlab = r_classes(h).labels
    coords = []
    for blk in part.blocks:
        names = {tuple(hlab[x] for x in labels[v]) for v in blk}
        if len(names) != 1:
            raise AssertionError("an R-class of the power is not a product of R-classes")
        coords.append(names.pop())
    return prod, labels, q, coords


def check_splitting(h: Graph, k: int = 2, sorted: bool = True) -> SplittingReport:
    """Test that every automorphism of ``h^{⋄k}/R`` permutes coordinates and acts factorwise.

    With ``sorted=False`` the automorphisms of the product and of ``h/R``
    are taken without regard to sorts.
    """
    _, _, q, coords = _class_coordinates(h, k)
    hq, _ = r_quotient(h)
    if not sorted:
        q, hq = q.unsorted(), hq.unsorted()
    factor_auts = {tuple(m) for m in iter_automorphisms(hq)}
    autos = list(iter_automorphisms(q))
    failures = []
    for psi in autos:
        if not _splits(psi, coords, factor_auts, k, hq.n):
            failures.append(psi)
    return SplittingReport(len(autos), tuple(failures))


def _splits(psi, coords, factor_auts, k, m) -> bool:
    """Look for a coordinate permutation and factor automorphisms reproducing ``psi``."""
    for pi in permutations(range(k)):
        good = True
        for i in range(k):
            f: dict[int, int] = {}
            for v, c in enumerate(coords):
                src, dst = c[pi[i]], coords[psi[v]][i]
                if f.setdefault(src, dst) != dst:
                    good = False
                    break
            if not good:
                break
            full = tuple(f.get(x, -1) for x in range(m))
            if full not in factor_auts:
                good = False
                break
        if good:
            return True
    return False


def local_p_automorphisms(h: Graph, k: int, p: int, constants: bool = False) -> SplittingReport:
    """Order-p automorphisms of ``h^{⋄k}`` and those among them that are not local.

    ``constants=True`` restricts to automorphisms fixing the diagonal
    vertices ``(a, ..., a)``.
    """
    from .reduction import iter_p_automorphisms

    prod, labels, _, _ = _class_coordinates(h, k)
    fixed = [v for v, lab in enumerate(labels) if len(set(lab)) == 1] if constants else []
    cls = r_classes(prod).labels
    autos = list(iter_p_automorphisms(prod, p, fixed))
    bad = tuple(a.mapping for a in autos if any(cls[v] != cls[w] for v, w in enumerate(a.mapping)))
    return SplittingReport(len(autos), bad)


def r_class_product_holds(a: Graph, b: Graph) -> bool:
    """Check ``[(x, y)] = [x] × [y]`` and ``(a⋄b)/R ≅ a/R ⋄ b/R``."""
    prod = diamond_product(a, b)
    labels = diamond_labels(a, b)
    la, lb, lp = r_classes(a).labels, r_classes(b).labels, r_classes(prod).labels
    for u, (x, y) in enumerate(labels):
        for v, (x2, y2) in enumerate(labels):
            if (lp[u] == lp[v]) != (la[x] == la[x2] and lb[y] == lb[y2]):
                return False
    qa, qb, qp = r_quotient(a)[0], r_quotient(b)[0], r_quotient(prod)[0]
    return canonical_form(diamond_product(qa, qb)) == canonical_form(qp)
