"""Core graph data model.

Vertices are dense indices ``0..n-1``. Loops are allowed unless the graph
carries a two-sort (L/R) labeling, in which case every edge must join an
``L`` vertex to an ``R`` vertex.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .exceptions import SortError

L = "L"
R = "R"

ISOLATED_VERTEX = "isolated_vertex"
REFLEXIVE_CLIQUE = "reflexive_clique"
COMPLETE_BIPARTITE = "complete_bipartite"
OTHER = "other"


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Finite graph with optional loops and an optional L/R labeling.

    ``edges`` may be given as any iterable of pairs; it is normalized to a
    frozenset of ``(min, max)`` tuples, ``(u, u)`` being a loop.
    """

    n: int
    edges: frozenset = frozenset()
    sorts: tuple | None = None

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise ValueError(f"vertex count must be a nonnegative int, got {self.n!r}")
        edges = frozenset(_edge(int(u), int(v)) for u, v in self.edges)
        for u, v in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {(u, v)} out of range for n={self.n}")
        object.__setattr__(self, "edges", edges)
        if self.sorts is not None:
            sorts = tuple(self.sorts)
            if len(sorts) != self.n or any(s not in (L, R) for s in sorts):
                raise SortError("sorts must label every vertex with 'L' or 'R'")
            for u, v in edges:
                if sorts[u] == sorts[v]:
                    raise SortError(f"edge {(u, v)} does not cross the L/R labeling")
            object.__setattr__(self, "sorts", sorts)

    def __repr__(self):
        s = f"Graph(n={self.n}, edges={sorted(self.edges)}"
        if self.sorts is not None:
            s += f", sorts={''.join(self.sorts)!r}"
        return s + ")"

    @property
    def is_sorted(self) -> bool:
        return self.sorts is not None

    @cached_property
    def adj(self) -> tuple[int, ...]:
        """Neighborhoods as bitmasks; bit ``v`` of ``adj[v]`` marks a loop."""
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    @cached_property
    def nbrs(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(_bits(m)) for m in self.adj)

    @cached_property
    def loop_mask(self) -> int:
        return sum(1 << v for v in range(self.n) if self.adj[v] >> v & 1)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def has_loop(self, v: int) -> bool:
        return bool(self.adj[v] >> v & 1)

    def degree(self, v: int) -> int:
        return len(self.nbrs[v])

    def side(self, s: str) -> tuple[int, ...]:
        if self.sorts is None:
            raise SortError("graph is not sorted")
        return tuple(v for v in range(self.n) if self.sorts[v] == s)

    @property
    def left(self) -> tuple[int, ...]:
        return self.side(L)

    @property
    def right(self) -> tuple[int, ...]:
        return self.side(R)

    def side_mask(self, s: str) -> int:
        return sum(1 << v for v in self.side(s))

    def unsorted(self) -> "Graph":
        return Graph(self.n, self.edges) if self.sorts is not None else self

    def with_sorts(self, sorts: Sequence[str] | None) -> "Graph":
        return Graph(self.n, self.edges, None if sorts is None else tuple(sorts))

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph whose vertex ``perm[v]`` plays the role of ``v``."""
        sorts = None
        if self.sorts is not None:
            out = [L] * self.n
            for v in range(self.n):
                out[perm[v]] = self.sorts[v]
            sorts = tuple(out)
        return Graph(self.n, {(perm[u], perm[v]) for u, v in self.edges}, sorts)


@dataclass(frozen=True)
class PinnedGraph:
    """A graph with an ordered tuple of distinguished vertices (repeats allowed)."""

    graph: Graph
    pins: tuple = ()

    def __post_init__(self):
        pins = tuple(int(v) for v in self.pins)
        for v in pins:
            if not 0 <= v < self.graph.n:
                raise ValueError(f"pin {v} out of range for n={self.graph.n}")
        object.__setattr__(self, "pins", pins)

    @property
    def arity(self) -> int:
        return len(self.pins)


@dataclass(frozen=True)
class Partition:
    """A partition of ``range(ground_size)``.

    Blocks are stored canonically: each block sorted, blocks ordered by
    their least element.
    """

    ground_size: int
    blocks: tuple = ()

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0] if b else -1))
        seen = [b for blk in blocks for b in blk]
        if any(len(b) == 0 for b in blocks):
            raise ValueError("partition blocks must be nonempty")
        if sorted(seen) != list(range(self.ground_size)):
            raise ValueError("blocks must be disjoint and cover the ground set")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        groups: dict[int, list[int]] = {}
        for v, lab in enumerate(labels):
            groups.setdefault(lab, []).append(v)
        return cls(len(labels), tuple(groups.values()))

    @classmethod
    def discrete(cls, n: int) -> "Partition":
        return cls(n, tuple((v,) for v in range(n)))

    @classmethod
    def indiscrete(cls, n: int) -> "Partition":
        return cls(n, (tuple(range(n)),) if n else ())

    @cached_property
    def labels(self) -> tuple[int, ...]:
        """Block index of every element."""
        out = [0] * self.ground_size
        for i, blk in enumerate(self.blocks):
            for v in blk:
                out[v] = i
        return tuple(out)

    def __len__(self):
        return len(self.blocks)

    @property
    def is_discrete(self) -> bool:
        return len(self.blocks) == self.ground_size


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


# ---------------------------------------------------------------------------
# structural operations


def connected_components(g: Graph) -> list[frozenset]:
    """Vertex sets of the connected components, ordered by least vertex."""
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.nbrs[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(frozenset(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) == 1


def bipartition(g: Graph) -> tuple | None:
    """An L/R labeling witnessing bipartiteness, or None.

    In each component the least vertex is labeled ``L``.
    """
    if g.loop_mask:
        return None
    sorts: list[str | None] = [None] * g.n
    for s in range(g.n):
        if sorts[s] is not None:
            continue
        sorts[s] = L
        queue = deque([s])
        while queue:
            u = queue.popleft()
            other = R if sorts[u] == L else L
            for w in g.nbrs[u]:
                if sorts[w] is None:
                    sorts[w] = other
                    queue.append(w)
                elif sorts[w] != other:
                    return None
    return tuple(sorts)


def is_bipartite(g: Graph) -> bool:
    return g.is_sorted or bipartition(g) is not None


def sorted_by_bipartition(g: Graph) -> Graph:
    """``g`` with its canonical bipartition attached; raises if not bipartite."""
    if g.is_sorted:
        return g
    sorts = bipartition(g)
    if sorts is None:
        raise SortError("graph is not bipartite")
    return g.with_sorts(sorts)


def neighborhood(g: Graph, s: Iterable[int]) -> frozenset:
    """Union of the neighborhoods of the vertices in ``s``."""
    m = 0
    for v in s:
        m |= g.adj[v]
    return frozenset(_bits(m))


def r_classes(g: Graph) -> Partition:
    """Classes of vertices with identical neighborhoods."""
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        groups.setdefault(g.adj[v], []).append(v)
    return Partition(g.n, tuple(groups.values()))


def is_r_thin(g: Graph) -> bool:
    return r_classes(g).is_discrete


def quotient(g: Graph, p: Partition) -> Graph:
    """Factor graph ``g/p``: one vertex per block, edges induced blockwise."""
    if p.ground_size != g.n:
        raise ValueError("partition ground set does not match the graph")
    lab = p.labels
    edges = {(lab[u], lab[v]) for u, v in g.edges}
    sorts = None
    if g.sorts is not None:
        block_sorts = []
        for blk in p.blocks:
            kinds = {g.sorts[v] for v in blk}
            if len(kinds) != 1:
                break
            block_sorts.append(kinds.pop())
        else:
            sorts = tuple(block_sorts)
    return Graph(len(p), edges, sorts)


def quotient_pinned(pg: PinnedGraph, p: Partition) -> PinnedGraph:
    lab = p.labels
    return PinnedGraph(quotient(pg.graph, p), tuple(lab[v] for v in pg.pins))


def induced_subgraph(g: Graph, s: Iterable[int]) -> Graph:
    """Subgraph induced by ``s``, re-indexed in increasing vertex order."""
    keep = sorted(set(s))
    for v in keep:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range")
    index = {v: i for i, v in enumerate(keep)}
    edges = {(index[u], index[v]) for u, v in g.edges if u in index and v in index}
    sorts = None if g.sorts is None else tuple(g.sorts[v] for v in keep)
    return Graph(len(keep), edges, sorts)


def disjoint_union(*graphs: Graph) -> Graph:
    """Disjoint union; sorts kept only if every part is sorted."""
    n = 0
    edges = set()
    sorts: list | None = []
    for g in graphs:
        edges |= {(u + n, v + n) for u, v in g.edges}
        if g.sorts is None or sorts is None:
            sorts = None
        else:
            sorts.extend(g.sorts)
        n += g.n
    return Graph(n, edges, None if sorts is None else tuple(sorts))


def structural_class(g: Graph) -> str:
    """Classify a connected graph by the tractable shapes of the dichotomy."""
    if g.n == 0 or not is_connected(g):
        raise ValueError("structural_class requires a connected, nonempty graph")
    if g.n == 1 and not g.loop_mask:
        return ISOLATED_VERTEX
    full = (1 << g.n) - 1
    if all(m == full for m in g.adj):
        return REFLEXIVE_CLIQUE
    sorts = bipartition(g)
    if sorts is not None:
        left = mask_of(v for v in range(g.n) if sorts[v] == L)
        right = full ^ left
        if all(g.adj[v] == (right if sorts[v] == L else left) for v in range(g.n)):
            return COMPLETE_BIPARTITE
    return OTHER


# ---------------------------------------------------------------------------
# named graphs


def empty_graph(n: int = 0, sorts: Sequence[str] | None = None) -> Graph:
    return Graph(n, (), None if sorts is None else tuple(sorts))


def path_graph(n: int, sorted: bool = False) -> Graph:
    g = Graph(n, {(i, i + 1) for i in range(n - 1)})
    return sorted_by_bipartition(g) if sorted else g


def cycle_graph(n: int, sorted: bool = False) -> Graph:
    g = Graph(n, {(i, (i + 1) % n) for i in range(n)})
    return sorted_by_bipartition(g) if sorted else g


def complete_graph(n: int, loops: bool = False) -> Graph:
    edges = set(combinations(range(n), 2))
    if loops:
        edges |= {(v, v) for v in range(n)}
    return Graph(n, edges)


def complete_bipartite(a: int, b: int, sorted: bool = True) -> Graph:
    """``K_{a,b}`` with the ``a`` side first (labeled L when sorted)."""
    edges = {(i, a + j) for i in range(a) for j in range(b)}
    sorts = (L,) * a + (R,) * b if sorted else None
    return Graph(a + b, edges, sorts)


def star_graph(k: int) -> Graph:
    """``K_{1,k}`` with the center at vertex 0 (unsorted)."""
    return Graph(k + 1, {(0, i) for i in range(1, k + 1)})


# ---------------------------------------------------------------------------
# JSON


def graph_to_json(g: Graph | PinnedGraph) -> dict:
    pins = None
    if isinstance(g, PinnedGraph):
        pins = list(g.pins)
        g = g.graph
    out: dict = {"n": g.n, "edges": [list(e) for e in sorted(g.edges)]}
    if g.sorts is not None:
        out["sorts"] = {"L": list(g.left), "R": list(g.right)}
    if pins is not None:
        out["pins"] = pins
    return out


def _int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ValueError(f"{what} must be an integer, got {x!r}")
    return x


def graph_from_json(obj) -> Graph | PinnedGraph:
    """Parse the graph JSON object; returns a PinnedGraph when ``pins`` is present."""
    if not isinstance(obj, dict) or "n" not in obj:
        raise ValueError("graph JSON must be an object with an 'n' field")
    unknown = set(obj) - {"n", "edges", "sorts", "pins"}
    if unknown:
        raise ValueError(f"unknown graph fields: {sorted(unknown)}")
    n = _int(obj["n"], "n")
    edges = []
    for e in obj.get("edges", []):
        if not isinstance(e, list) or len(e) != 2:
            raise ValueError(f"edge must be a pair, got {e!r}")
        edges.append((_int(e[0], "edge endpoint"), _int(e[1], "edge endpoint")))
    sorts = None
    if obj.get("sorts") is not None:
        s = obj["sorts"]
        if not isinstance(s, dict) or set(s) - {"L", "R"}:
            raise SortError("sorts must be an object with 'L' and 'R' lists")
        labels: list[str | None] = [None] * n
        for side in (L, R):
            for v in s.get(side, []):
                v = _int(v, "sorted vertex")
                if not 0 <= v < n:
                    raise ValueError(f"sorted vertex {v} out of range")
                if labels[v] is not None:
                    raise SortError(f"vertex {v} labeled twice")
                labels[v] = side
        if any(x is None for x in labels):
            raise SortError("sorts must label every vertex")
        sorts = tuple(labels)
    g = Graph(n, edges, sorts)
    if "pins" in obj:
        return PinnedGraph(g, tuple(_int(v, "pin") for v in obj["pins"]))
    return g
