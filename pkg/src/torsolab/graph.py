"""Simple undirected graphs on vertices ``0..n-1`` and the primitives built on them."""

from __future__ import annotations

from typing import Iterable, Iterator


class GraphInputError(ValueError):
    """Raised when an operation receives vertices or edges outside the graph."""


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple undirected graph.

    Vertices are the integers ``0..n-1``.  Neighbour lists are kept sorted, so
    every iteration order in the package follows label order.
    """

    __slots__ = ("_n", "_edges", "_adj", "_masks", "_hash")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphInputError(f"vertex count must be non-negative, got {n}")
        es = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphInputError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphInputError(f"edge ({u}, {v}) out of range for n={n}")
            es.add(_norm_edge(u, v))
        nbrs: list[list[int]] = [[] for _ in range(n)]
        masks = [0] * n
        for u, v in es:
            nbrs[u].append(v)
            nbrs[v].append(u)
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        self._n = n
        self._edges = frozenset(es)
        self._adj = tuple(tuple(sorted(a)) for a in nbrs)
        self._masks = tuple(masks)
        self._hash = None

    @classmethod
    def from_masks(cls, masks: Iterable[int]) -> "Graph":
        masks = list(masks)
        edges = []
        for u, m in enumerate(masks):
            m >>= u + 1
            v = u + 1
            while m:
                if m & 1:
                    edges.append((u, v))
                m >>= 1
                v += 1
        return cls(len(masks), edges)

    @property
    def n(self) -> int:
        return self._n

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return self._edges

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def masks(self) -> tuple[int, ...]:
        """Adjacency bitmasks, bit ``v`` of ``masks[u]`` set iff ``uv`` is an edge."""
        return self._masks

    def vertices(self) -> range:
        return range(self._n)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self._edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self._masks[u] >> v & 1)

    def relabel(self, perm) -> "Graph":
        """Return the graph with vertex ``v`` renamed to ``perm[v]``."""
        if sorted(perm) != list(range(self._n)):
            raise GraphInputError("relabeling is not a permutation of the vertices")
        return Graph(self._n, ((perm[u], perm[v]) for u, v in self._edges))

    def components(self, within: int | None = None) -> list[list[int]]:
        """Connected components, each sorted, ordered by smallest member.

        ``within`` restricts the graph to the vertices of a bitmask.
        """
        if within is None:
            within = (1 << self._n) - 1
        return [list(iter_bits(c)) for c in components_mask(self._masks, within)]

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._n, self._edges))
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, edges={self.sorted_edges()})"


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def components_mask(masks, within: int) -> list[int]:
    """Components of the subgraph induced by ``within``, as bitmasks in order of least vertex."""
    out = []
    rest = within
    while rest:
        low = rest & -rest
        comp = low
        frontier = low
        while frontier:
            nb = 0
            for v in iter_bits(frontier):
                nb |= masks[v]
            frontier = nb & rest & ~comp
            comp |= frontier
        out.append(comp)
        rest &= ~comp
    return out


def _check_vertices(g: Graph, vs: Iterable[int]) -> list[int]:
    vs = sorted(set(vs))
    for v in vs:
        if not 0 <= v < g.n:
            raise GraphInputError(f"vertex {v} out of range for n={g.n}")
    return vs


def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """Subgraph induced by ``s``, relabeled order-preservingly to ``0..|s|-1``."""
    vs = _check_vertices(g, s)
    mapping = {v: i for i, v in enumerate(vs)}
    edges = [(mapping[u], mapping[v]) for u, v in g.edges if u in mapping and v in mapping]
    return Graph(len(vs), edges), mapping


def contract_edge(g: Graph, e: tuple[int, int]) -> Graph:
    """Contract ``e``; the merged vertex keeps ``min(u, v)`` and higher labels shift down past ``max(u, v)``."""
    u, v = _norm_edge(*e)
    if not (0 <= u < g.n and 0 <= v < g.n) or not g.has_edge(u, v):
        raise GraphInputError(f"({e[0]}, {e[1]}) is not an edge")

    def lab(x: int) -> int:
        if x == v:
            return u
        return x - 1 if x > v else x

    edges = set()
    for a, b in g.edges:
        a2, b2 = lab(a), lab(b)
        if a2 != b2:
            edges.add(_norm_edge(a2, b2))
    return Graph(g.n - 1, edges)


def complement(g: Graph) -> Graph:
    return Graph(g.n, ((u, v) for u in range(g.n) for v in range(u + 1, g.n) if not g.has_edge(u, v)))


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    off = 0
    for h in graphs:
        edges.extend((u + off, v + off) for u, v in h.edges)
        off += h.n
    return Graph(off, edges)


def is_subgraph(g: Graph, host: Graph) -> bool:
    """True when ``g`` is a labeled subgraph of ``host`` (same vertex labels, subset of edges)."""
    return g.n <= host.n and all(host.has_edge(u, v) for u, v in g.edges)
