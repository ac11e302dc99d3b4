"""Möbius inversion over partition lattices.

The key identity: for pinned graphs g, h

    inj(g, h) = sum over partitions θ of V(g) of  μ(0, θ) · hom(g/θ, h)

with μ(0, θ) = Π_B (-1)^(|B|-1) (|B|-1)!. Taking g = h gives |Aut(h)|.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Iterator, Sequence

from .graph import Graph, Partition, PinnedGraph, quotient_pinned
from .hom import count_hom_pinned
from .iso import iso_classes, iter_automorphisms

DEFAULT_MAX_BELL = 10


def _guard(n: int, max_n: int | None) -> None:
    cap = DEFAULT_MAX_BELL if max_n is None else max_n
    if n > cap:
        raise ValueError(f"ground set of size {n} exceeds the partition cap {cap}")


def enumerate_partitions(n: int, max_n: int | None = None) -> Iterator[Partition]:
    """All partitions of ``range(n)``, as restricted-growth strings in lex order."""
    if n < 0:
        raise ValueError("ground size must be nonnegative")
    _guard(n, max_n)
    if n == 0:
        yield Partition(0)
        return
    rgs = [0] * n
    # maxes[i] = max(rgs[:i]) so that rgs[i] may go up to maxes[i] + 1
    maxes = [0] * n
    while True:
        yield Partition.from_labels(rgs)
        i = n - 1
        while i > 0 and rgs[i] == maxes[i] + 1:
            i -= 1
        if i == 0:
            return
        rgs[i] += 1
        for j in range(i + 1, n):
            rgs[j] = 0
            maxes[j] = max(maxes[j - 1], rgs[j - 1])


def bell(n: int) -> int:
    """Bell number via the Bell triangle."""
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def mobius_weight(theta: Partition) -> int:
    """μ(0, θ) in the partition lattice."""
    w = 1
    for blk in theta.blocks:
        k = len(blk)
        w *= (-1) ** (k - 1) * factorial(k - 1)
    return w


def _sort_homogeneous(g: Graph, theta: Partition) -> bool:
    if g.sorts is None:
        return True
    return all(len({g.sorts[v] for v in blk}) == 1 for blk in theta.blocks)


def inj_via_inversion(g: PinnedGraph | Graph, h: PinnedGraph | Graph, max_n: int | None = None) -> int:
    """Injective homomorphism count recovered from hom counts of quotients.

    For sorted graphs, partitions mixing sorts are skipped: no
    sort-preserving map can identify an L vertex with an R vertex.
    """
    if isinstance(g, Graph):
        g = PinnedGraph(g)
    if isinstance(h, Graph):
        h = PinnedGraph(h)
    if len(g.pins) != len(h.pins):
        raise ValueError("pin tuples differ in length")
    return sum(w * count_hom_pinned(q, h) for w, q in _weighted_quotients(g, max_n))


@lru_cache(maxsize=256)
def _weighted_quotients(g: PinnedGraph, max_n: int | None) -> tuple:
    # the same source is usually inverted against many targets
    out = []
    for theta in enumerate_partitions(g.graph.n, max_n):
        if _sort_homogeneous(g.graph, theta):
            out.append((mobius_weight(theta), quotient_pinned(g, theta)))
    return tuple(out)


def aut_order(h: Graph, max_n: int | None = None) -> int:
    """|Aut(h)| as the number of injective endomorphisms."""
    return inj_via_inversion(h, h, max_n)


def stabilizer(h: Graph, points: Sequence[int]) -> list[tuple[int, ...]]:
    """Automorphisms of ``h`` fixing every vertex in ``points``."""
    return list(iter_automorphisms(h, fixed={v: v for v in points}))


# ---------------------------------------------------------------------------
# indistinguishability


@dataclass(frozen=True)
class Indistinguishability:
    """Verdict of :func:`indistinguishable`.

    ``kind`` is ``"isomorphic"`` (with ``automorphism`` mapping a to b),
    ``"distinguished"`` (with a pinned ``witness`` whose counts differ) or
    ``"inconclusive"`` when neither was found within the bound.
    """

    kind: str
    automorphism: tuple | None = None
    witness: PinnedGraph | None = None
    counts: tuple | None = None


def _sortings(k: Graph):
    """Every L/R labeling of ``k`` that makes it a sorted graph."""
    if k.loop_mask:
        return
    for mask in range(1 << k.n):
        sorts = tuple("L" if mask >> v & 1 else "R" for v in range(k.n))
        if all(sorts[u] != sorts[v] for u, v in k.edges):
            yield k.with_sorts(sorts)


def indistinguishable(h: Graph, a: int, b: int, search_bound: int = 3) -> Indistinguishability:
    """Decide whether ``a`` and ``b`` lie in the same orbit of Aut(h).

    Orbit search is exact. When it fails, pinned test graphs with at most
    ``search_bound`` vertices are tried until one separates the two
    pinned hom counts.
    """
    for v in (a, b):
        if not 0 <= v < h.n:
            raise ValueError(f"vertex {v} out of range")
    auto = next(iter_automorphisms(h, fixed={a: b}), None)
    if auto is not None:
        return Indistinguishability("isomorphic", automorphism=auto)
    ha, hb = PinnedGraph(h, (a,)), PinnedGraph(h, (b,))
    for k in range(1, search_bound + 1):
        for base in iso_classes(k):
            variants = [base] if h.sorts is None else list(_sortings(base))
            for kg in variants:
                for x in range(k):
                    kp = PinnedGraph(kg, (x,))
                    ca, cb = count_hom_pinned(kp, ha), count_hom_pinned(kp, hb)
                    if ca != cb:
                        return Indistinguishability("distinguished", witness=kp, counts=(ca, cb))
    return Indistinguishability("inconclusive")
