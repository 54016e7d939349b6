"""Exact exponential-time containment and symmetry searches.

These stand in for polynomial minor testing at desk scale and are the ground
truth the rest of the package is checked against.  Every search refuses
inputs above the configured ceilings instead of running unbounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .config import Ceilings, SizeLimitError, ceilings
from .graph import Graph, components_mask, iter_bits, to_mask


@dataclass(frozen=True)
class MinorModel:
    """``branch_sets[i]`` is the sorted host vertex set contracted onto pattern vertex ``i``."""

    branch_sets: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {"type": "minor_model", "branch_sets": [list(b) for b in self.branch_sets]}


@dataclass(frozen=True)
class TopologicalModel:
    """Branch vertices plus one host path per pattern edge ``(i, j)``, ``i < j``, running from ``i``'s image to ``j``'s."""

    branch_vertices: tuple[int, ...]
    paths: tuple[tuple[tuple[int, int], tuple[int, ...]], ...]

    def path(self, i: int, j: int) -> tuple[int, ...]:
        return dict(self.paths)[(i, j)]

    def to_json(self) -> dict:
        return {
            "type": "topological_model",
            "branch_vertices": list(self.branch_vertices),
            "paths": [{"edge": list(e), "path": list(p)} for e, p in self.paths],
        }


def _guard(g: Graph, h: Graph | None = None, limits: Ceilings | None = None) -> None:
    limits = limits or ceilings()
    if g.n > limits.host:
        raise SizeLimitError(f"host graph has {g.n} vertices, oracle ceiling is {limits.host}")
    if h is not None and h.n > limits.pattern:
        raise SizeLimitError(f"pattern has {h.n} vertices, pattern ceiling is {limits.pattern}")


# --- model checks -------------------------------------------------------------

def is_minor_model(h: Graph, g: Graph, model: MinorModel) -> bool:
    sets = model.branch_sets
    if len(sets) != h.n:
        return False
    seen = 0
    masks = []
    for b in sets:
        if not b or any(not 0 <= v < g.n for v in b):
            return False
        m = to_mask(b)
        if m & seen or len(components_mask(g.masks, m)) != 1:
            return False
        seen |= m
        masks.append(m)
    for i, j in h.edges:
        if not any(g.masks[v] & masks[j] for v in iter_bits(masks[i])):
            return False
    return True


def is_topological_model(h: Graph, g: Graph, model: TopologicalModel) -> bool:
    bv = model.branch_vertices
    if len(bv) != h.n or len(set(bv)) != h.n or any(not 0 <= v < g.n for v in bv):
        return False
    paths = dict(model.paths)
    if set(paths) != set(h.edges) or len(paths) != len(model.paths):
        return False
    branch = set(bv)
    internal: set[int] = set()
    for (i, j), p in paths.items():
        if len(p) < 2 or p[0] != bv[i] or p[-1] != bv[j] or len(set(p)) != len(p):
            return False
        if any(not g.has_edge(a, b) for a, b in zip(p, p[1:])):
            return False
        inner = set(p[1:-1])
        if inner & branch or inner & internal:
            return False
        internal |= inner
    return True


def is_isomorphism(g: Graph, h: Graph, phi) -> bool:
    if g.n != h.n or g.m != h.m or sorted(phi) != list(range(g.n)):
        return False
    return all(h.has_edge(phi[u], phi[v]) for u, v in g.edges)


# --- minors -------------------------------------------------------------------

@lru_cache(maxsize=512)
def _connected_subsets(g: Graph) -> tuple[tuple[int, int], ...]:
    """Every connected vertex subset of ``g`` with its open neighbourhood, as mask pairs.

    Ordered by size, then lexicographically by sorted members (which is
    descending order of the bit-reversed mask).
    """
    n = g.n
    masks = g.masks
    found: dict[int, int] = {}
    for v in range(n):
        # grow sets whose least vertex is v
        higher = ~((1 << (v + 1)) - 1)
        start = 1 << v
        found[start] = masks[v]
        stack = [start]
        while stack:
            s = stack.pop()
            nb = found[s]
            for u in iter_bits(nb & higher):
                t = s | (1 << u)
                if t not in found:
                    found[t] = (nb | masks[u]) & ~t
                    stack.append(t)
    rev = [1 << (n - 1 - v) for v in range(n)]

    def key(item):
        m = item[0]
        r = 0
        for v in iter_bits(m):
            r |= rev[v]
        return (m.bit_count(), -r)

    return tuple(sorted(found.items(), key=key))


def _neighborhood(masks, s: int) -> int:
    nb = 0
    for v in iter_bits(s):
        nb |= masks[v]
    return nb & ~s


def _reduce_host(h: Graph, g: Graph) -> tuple[Graph, list[int]]:
    """Shrink ``g`` without changing whether ``h`` is a minor of it.

    Vertices of degree <= 1 are deleted when every pattern vertex has degree
    >= 2; degree-2 vertices are contracted into their lower neighbour when
    every pattern vertex has degree >= 3.  Returns the reduced graph and, for
    each of its vertices, the mask of original vertices it stands for.
    """
    mindeg = min(h.degrees(), default=0)
    if mindeg < 2:
        return g, [1 << v for v in range(g.n)]
    adj = {v: set(g.neighbors(v)) for v in range(g.n)}
    group = {v: 1 << v for v in range(g.n)}
    changed = True
    while changed:
        changed = False
        for v in sorted(adj):
            d = len(adj[v])
            if d <= 1:
                for u in adj[v]:
                    adj[u].discard(v)
                del adj[v], group[v]
                changed = True
            elif d == 2 and mindeg >= 3:
                a = min(adj[v])
                for u in adj[v]:
                    adj[u].discard(v)
                    if u != a:
                        adj[u].add(a)
                        adj[a].add(u)
                group[a] |= group[v]
                del adj[v], group[v]
                changed = True
    keep = sorted(adj)
    index = {v: i for i, v in enumerate(keep)}
    reduced = Graph(len(keep), ((index[u], index[w]) for u in keep for w in adj[u] if u < w))
    return reduced, [group[v] for v in keep]


def _twin_predecessor(h: Graph) -> list[int]:
    """For each pattern vertex, the closest lower vertex with the same neighbourhood (ignoring each other), or -1."""
    out = []
    for i in range(h.n):
        prev = -1
        for j in range(i - 1, -1, -1):
            if h.masks[i] & ~(1 << j) == h.masks[j] & ~(1 << i):
                prev = j
                break
        out.append(prev)
    return out


def find_minor(h: Graph, g: Graph, limits: Ceilings | None = None) -> MinorModel | None:
    """Search for ``h`` as a minor of ``g``; ``None`` when there is none.

    Branch sets are assigned to pattern vertices in ascending order, each
    candidate taken from the connected subsets of the (reduced) host in
    (size, lex) order, so the witness is deterministic.  Interchangeable
    pattern vertices get branch sets with increasing least vertex.
    """
    _guard(g, h, limits)
    k = h.n
    if k == 0:
        return MinorModel(())
    if k > g.n or h.m > g.m:
        return None
    host, groups = _reduce_host(h, g)
    if k > host.n or h.m > host.m:
        return None
    masks = host.masks
    subsets = _connected_subsets(host)
    earlier = [[j for j in h.neighbors(i) if j < i] for i in range(k)]
    later = [[j for j in h.neighbors(i) if j > i] for i in range(k)]
    twin = _twin_predecessor(h)
    chosen = [0] * k
    full = (1 << host.n) - 1

    def future_ok(used: int, upto: int) -> bool:
        free = full & ~used
        if free.bit_count() < k - upto - 1:
            return False
        comps = None
        for j in range(upto + 1, k):
            need = [chosen[i] for i in earlier[j] if i <= upto]
            if not need:
                continue
            if comps is None:
                comps = components_mask(masks, free)
            if not any(all(_neighborhood(masks, c) & b for b in need) for c in comps):
                return False
        return True

    def search(i: int, used: int) -> bool:
        if i == k:
            return True
        room = host.n - used.bit_count() - (k - i - 1)
        floor = chosen[twin[i]] & -chosen[twin[i]] if twin[i] >= 0 else 0
        for s, nb in subsets:
            if s & used or (s & -s) < floor:
                continue
            if s.bit_count() > room:
                break
            if any(not nb & chosen[j] for j in earlier[i]):
                continue
            # each later pattern neighbour needs its own free vertex next to s
            if (nb & ~used).bit_count() < len(later[i]):
                continue
            chosen[i] = s
            if future_ok(used | s, i) and search(i + 1, used | s):
                return True
        chosen[i] = 0
        return False

    if not search(0, 0):
        return None
    lifted = []
    for s in chosen:
        m = 0
        for v in iter_bits(s):
            m |= groups[v]
        lifted.append(tuple(iter_bits(m)))
    return MinorModel(tuple(lifted))


# --- topological subgraphs ----------------------------------------------------

def _paths(masks, a: int, b: int, allowed: int, max_len: int):
    """Simple a-b paths with interior inside ``allowed``, by length then lexicographically."""
    for length in range(1, max_len + 1):
        path = [a]

        def extend(v: int, remaining: int, avail: int):
            if remaining == 1:
                if masks[v] >> b & 1:
                    yield tuple(path) + (b,)
                return
            for u in iter_bits(masks[v] & avail):
                path.append(u)
                yield from extend(u, remaining - 1, avail & ~(1 << u))
                path.pop()

        yield from extend(a, length, allowed)


def find_topological_subgraph(h: Graph, g: Graph, limits: Ceilings | None = None) -> TopologicalModel | None:
    """Search for a subdivision of ``h`` inside ``g``; ``None`` when there is none."""
    _guard(g, h, limits)
    k = h.n
    if k == 0:
        return TopologicalModel((), ())
    if k > g.n or h.m > g.m:
        return None
    masks = g.masks
    gdeg = g.degrees()
    hdeg = h.degrees()
    earlier = [[j for j in h.neighbors(i) if j < i] for i in range(k)]
    branch = [-1] * k
    routed: dict[tuple[int, int], tuple[int, ...]] = {}
    full = (1 << g.n) - 1

    def route(i: int, idx: int, used: int) -> bool:
        # used: branch vertices plus interiors of routed paths
        if idx == len(earlier[i]):
            return place(i + 1, used)
        j = earlier[i][idx]
        a, b = branch[j], branch[i]
        allowed = full & ~used
        for p in _paths(masks, a, b, allowed, allowed.bit_count() + 1):
            routed[(j, i)] = p
            if route(i, idx + 1, used | to_mask(p[1:-1])):
                return True
        routed.pop((j, i), None)
        return False

    def place(i: int, used: int) -> bool:
        if i == k:
            return True
        for v in range(g.n):
            if used >> v & 1 or gdeg[v] < hdeg[i]:
                continue
            # a branch vertex needs one free or already-placed-neighbour edge per pattern edge
            reach = masks[v] & (~used | to_mask(branch[j] for j in earlier[i]))
            if reach.bit_count() < hdeg[i]:
                continue
            branch[i] = v
            if route(i, 0, used | (1 << v)):
                return True
        branch[i] = -1
        return False

    if not place(0, 0):
        return None
    return TopologicalModel(tuple(branch), tuple(sorted(routed.items())))


# --- isomorphism and automorphisms --------------------------------------------

def _isomorphisms(g: Graph, h: Graph):
    """Adjacency-preserving bijections g -> h, in lexicographic order of the image tuple."""
    n = g.n
    if n != h.n or g.m != h.m or sorted(g.degrees()) != sorted(h.degrees()):
        return
    gdeg, hdeg = g.degrees(), h.degrees()
    gm, hm = g.masks, h.masks
    phi = [-1] * n

    def extend(v: int, used: int):
        if v == n:
            yield tuple(phi)
            return
        for w in range(n):
            if used >> w & 1 or hdeg[w] != gdeg[v]:
                continue
            if all((gm[v] >> u & 1) == (hm[w] >> phi[u] & 1) for u in range(v)):
                phi[v] = w
                yield from extend(v + 1, used | (1 << w))
        phi[v] = -1

    yield from extend(0, 0)


def is_isomorphic_brute(g: Graph, h: Graph, limits: Ceilings | None = None) -> tuple[int, ...] | None:
    """First isomorphism g -> h in backtracking order (``phi[v]`` is the image of ``v``), or ``None``."""
    _guard(g, None, limits)
    _guard(h, None, limits)
    return next(_isomorphisms(g, h), None)


def automorphisms(g: Graph, limits: Ceilings | None = None) -> list[tuple[int, ...]]:
    _guard(g, None, limits)
    return list(_isomorphisms(g, g))


def compose(p, q) -> tuple[int, ...]:
    """``(p o q)[v] = p[q[v]]``."""
    return tuple(p[x] for x in q)


def inverse(p) -> tuple[int, ...]:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)
