"""Isomorphism search, canonical forms and small-graph enumeration.

Everything here is exhaustive search with color-refinement pruning, which
is plenty for graphs of a dozen vertices or so.
"""

from __future__ import annotations

from typing import Callable, Iterator, Sequence

from .graph import Graph

# A refinement "color" is an int; colors from one call to ``refine`` are
# comparable across all graphs passed to that call.


def _initial_colors(g: Graph) -> list:
    return [
        (g.sorts[v] if g.sorts is not None else "", g.has_loop(v), g.degree(v))
        for v in range(g.n)
    ]


def refine(graphs: Sequence[Graph], initial: Sequence[Sequence] | None = None) -> list[list[int]]:
    """Joint 1-dimensional Weisfeiler-Leman refinement.

    Returns one color list per graph. The palette is shared and canonical:
    relabeling a graph permutes its colors but never renames them.
    """
    if initial is None:
        cols = [_initial_colors(g) for g in graphs]
    else:
        cols = [list(c) for c in initial]
    palette = sorted({c for cs in cols for c in cs})
    rank = {c: i for i, c in enumerate(palette)}
    cur = [[rank[c] for c in cs] for cs in cols]
    ncolors = len(palette)
    while True:
        sigs = [
            [(cs[v], tuple(sorted(cs[w] for w in g.nbrs[v]))) for v in range(g.n)]
            for g, cs in zip(graphs, cur)
        ]
        palette = sorted({s for ss in sigs for s in ss})
        rank = {s: i for i, s in enumerate(palette)}
        cur = [[rank[s] for s in ss] for ss in sigs]
        if len(palette) == ncolors:
            return cur
        ncolors = len(palette)


def iter_isomorphisms(
    g: Graph,
    h: Graph,
    fixed: dict[int, int] | None = None,
    prune: Callable[[list[int]], bool] | None = None,
    colors: tuple[Sequence, Sequence] | None = None,
) -> Iterator[tuple[int, ...]]:
    """Yield every isomorphism ``g -> h`` as a tuple ``m`` with ``m[v]`` the image of ``v``.

    Isomorphisms come out in lexicographic order. ``fixed`` forces some
    images; ``prune(partial)`` may veto a partial assignment (a list of
    images of vertices ``0..k-1``). ``colors`` overrides the initial vertex
    coloring of both graphs; images must preserve it.
    Sorted graphs must be matched with sorted graphs and sorts are preserved.
    """
    if g.n != h.n or len(g.edges) != len(h.edges):
        return
    if (g.sorts is None) != (h.sorts is None):
        return
    if colors is None:
        init = None
    else:
        init = [[(a, b) for a, b in zip(colors[0], _initial_colors(g))],
                [(a, b) for a, b in zip(colors[1], _initial_colors(h))]]
    cg, ch = refine([g, h], init)
    if sorted(cg) != sorted(ch):
        return
    fixed = fixed or {}
    for v, w in fixed.items():
        if cg[v] != ch[w]:
            return
    n = g.n
    img = [-1] * n
    used = [False] * n
    cand = [[w for w in range(n) if ch[w] == cg[v]] for v in range(n)]
    for v, w in fixed.items():
        cand[v] = [w] if w in cand[v] else []
    gadj, hadj = g.adj, h.adj

    def ok(v: int, w: int) -> bool:
        if (gadj[v] >> v & 1) != (hadj[w] >> w & 1):
            return False
        for u in range(v):
            if (gadj[v] >> u & 1) != (hadj[w] >> img[u] & 1):
                return False
        return True

    def rec(v: int):
        if v == n:
            yield tuple(img)
            return
        for w in cand[v]:
            if used[w] or not ok(v, w):
                continue
            img[v] = w
            used[w] = True
            if prune is None or not prune(img[: v + 1]):
                yield from rec(v + 1)
            used[w] = False
            img[v] = -1

    yield from rec(0)


def find_isomorphism(g: Graph, h: Graph, fixed: dict[int, int] | None = None) -> tuple[int, ...] | None:
    return next(iter_isomorphisms(g, h, fixed), None)


def are_isomorphic(g: Graph, h: Graph) -> bool:
    return find_isomorphism(g, h) is not None


def iter_automorphisms(h: Graph, fixed: dict[int, int] | None = None, prune=None) -> Iterator[tuple[int, ...]]:
    return iter_isomorphisms(h, h, fixed, prune)


def is_automorphism(h: Graph, perm: Sequence[int]) -> bool:
    if sorted(perm) != list(range(h.n)):
        return False
    if h.sorts is not None and any(h.sorts[v] != h.sorts[perm[v]] for v in range(h.n)):
        return False
    return all(h.has_edge(perm[u], perm[v]) for u, v in h.edges)


# ---------------------------------------------------------------------------
# canonical form


def _code(g: Graph, order: Sequence[int]) -> tuple:
    """Adjacency code of ``g`` with ``order[i]`` placed at position ``i``."""
    pos = [0] * g.n
    for i, v in enumerate(order):
        pos[v] = i
    edges = tuple(sorted(tuple(sorted((pos[u], pos[v]))) for u, v in g.edges))
    sorts = "" if g.sorts is None else "".join(g.sorts[v] for v in order)
    return (g.n, len(edges), sorts, edges)


def canonical_order(g: Graph) -> tuple[int, ...]:
    """A vertex ordering such that isomorphic graphs get identical :func:`_code`.

    Individualization-refinement: refine, split the first smallest
    non-singleton cell on each of its vertices, keep the least leaf code.
    """
    best: list = [None, None]

    def search(colors: list[int]):
        colors = refine([g], [colors])[0]
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(colors):
            cells.setdefault(c, []).append(v)
        if len(cells) == g.n:
            order = sorted(range(g.n), key=lambda v: colors[v])
            code = _code(g, order)
            if best[0] is None or code < best[0]:
                best[0], best[1] = code, tuple(order)
            return
        target = min((c for c in cells if len(cells[c]) > 1), key=lambda c: (len(cells[c]), c))
        for v in cells[target]:
            nxt = [(2 * c, 0) for c in colors]
            nxt[v] = (2 * colors[v], -1)  # individualized vertex sorts first in its cell
            search(nxt)

    if g.n == 0:
        return ()
    search(_initial_colors(g))
    return best[1]


def canonical_form(g: Graph) -> tuple:
    """Hashable complete invariant: equal iff the graphs are isomorphic."""
    return _code(g, canonical_order(g))


def canonical_graph(g: Graph) -> Graph:
    """Representative of the isomorphism class of ``g``."""
    order = canonical_order(g)
    perm = [0] * g.n
    for i, v in enumerate(order):
        perm[v] = i
    return g.relabel(perm)


def canonical_key(g: Graph) -> tuple:
    """Sort key (vertex count, edge count, canonical code)."""
    code = canonical_form(g)
    return (g.n, len(g.edges), code)


# ---------------------------------------------------------------------------
# enumeration of small graphs


def iso_classes(n: int, loops: bool = True) -> list[Graph]:
    """One representative per isomorphism class of graphs on ``n`` vertices.

    Built by vertex extension with canonical deduplication. With loops
    allowed the class counts for n = 0..5 are 1, 2, 6, 20, 90, 544.
    """
    level = [Graph(0)]
    for k in range(n):
        seen: dict[tuple, Graph] = {}
        for g in level:
            span = k + 1 if loops else k
            for mask in range(1 << span):
                extra = {(v, k) for v in range(span) if mask >> v & 1}
                h = Graph(k + 1, g.edges | extra)
                key = canonical_form(h)
                if key not in seen:
                    seen[key] = canonical_graph(h)
        level = sorted(seen.values(), key=canonical_key)
    return level
