"""Partial Dominating Set: pick as few vertices as possible whose closed
neighbourhoods cover at least ``t`` vertices.

The dynamic programme walks a rooted tree decomposition bottom-up.  Bag
vertices carry one of three states (chosen, dominated, undominated) and a
counter records how many vertices already left the bags dominated.  Each
table entry keeps its cheapest partial solution, ties going to the
lexicographically least vertex set.  Because partial solutions at one entry
are completed by the same disjoint extensions, that preference survives
every union and the root yields the lexicographically least optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .config import Ceilings, SizeLimitError, ceilings
from .decomposition import InvalidDecompositionError, TreeDecomposition, verify_decomposition
from .graph import Graph, iter_bits


@dataclass(frozen=True)
class PdsInstance:
    graph: Graph
    t: int

    def __post_init__(self):
        if not 0 <= self.t <= self.graph.n:
            raise ValueError(f"target {self.t} must lie in [0, {self.graph.n}]")


@dataclass(frozen=True)
class PdsSolution:
    chosen: tuple[int, ...]
    dominated_count: int

    @property
    def size(self) -> int:
        return len(self.chosen)

    def to_json(self) -> dict:
        return {"chosen": list(self.chosen), "size": self.size, "dominated": self.dominated_count}


def dominated_count(g: Graph, chosen) -> int:
    covered = 0
    for v in chosen:
        covered |= g.masks[v] | 1 << v
    return covered.bit_count()


def _solution(g: Graph, chosen) -> PdsSolution:
    chosen = tuple(sorted(chosen))
    return PdsSolution(chosen, dominated_count(g, chosen))


def solve_pds_brute(inst: PdsInstance, limits: Ceilings | None = None) -> PdsSolution:
    """Try every vertex set by size, then lexicographically."""
    g, t = inst.graph, inst.t
    limits = limits or ceilings()
    if g.n > limits.host:
        raise SizeLimitError(f"{g.n} vertices exceeds the brute-force ceiling {limits.host}")
    closed = [g.masks[v] | 1 << v for v in range(g.n)]
    for k in range(g.n + 1):
        for combo in combinations(range(g.n), k):
            covered = 0
            for v in combo:
                covered |= closed[v]
            if covered.bit_count() >= t:
                return _solution(g, combo)
    raise AssertionError("the full vertex set always dominates n vertices")


def max_coverage_brute(g: Graph, k: int, limits: Ceilings | None = None) -> PdsSolution:
    """Most vertices dominated by at most ``k`` chosen ones (the solution-size parameterisation)."""
    best = max(t for t in range(g.n + 1) if solve_pds_brute(PdsInstance(g, t), limits).size <= k)
    return solve_pds_brute(PdsInstance(g, best), limits)


# Table entries map (chosen mask, dominated mask, count) to (cost, -rank) where
# rank has bit n-1-v for every chosen v; a larger rank is the lexicographically
# smaller set among sets of equal size.

def _better(table: dict, key, value) -> None:
    old = table.get(key)
    if old is None or value < old:
        table[key] = value


class _Dp:
    def __init__(self, g: Graph, cap: int):
        self.g = g
        self.cap = cap
        self.masks = g.masks

    def introduce(self, table: dict, bag: int, v: int) -> dict:
        nb = self.masks[v] & bag
        bit = 1 << v
        rbit = 1 << (self.g.n - 1 - v)
        out: dict = {}
        for (c, d, cnt), (cost, neg) in table.items():
            _better(out, (c | bit, d | (nb & ~c), cnt), (cost + 1, -((-neg) | rbit)))
            _better(out, (c, d | bit if nb & c else d, cnt), (cost, neg))
        return out

    def forget(self, table: dict, v: int) -> dict:
        bit = 1 << v
        out: dict = {}
        for (c, d, cnt), value in table.items():
            if (c | d) & bit:
                cnt = min(self.cap, cnt + 1)
            _better(out, (c & ~bit, d & ~bit, cnt), value)
        return out

    def join(self, left: dict, right: dict) -> dict:
        by_c: dict[int, list] = {}
        for (c, d, cnt), value in right.items():
            by_c.setdefault(c, []).append((d, cnt, value))
        out: dict = {}
        for (c, d1, cnt1), (cost1, neg1) in left.items():
            shared = c.bit_count()
            for d2, cnt2, (cost2, neg2) in by_c.get(c, ()):
                _better(out, (c, d1 | d2, min(self.cap, cnt1 + cnt2)),
                        (cost1 + cost2 - shared, -((-neg1) | (-neg2))))
        return out

    def node(self, t: TreeDecomposition, x: int, kids: dict[int, list[int]]) -> dict:
        """Table over bag(x) for the subtree of x, every edge inside it accounted for."""
        bag = 0
        for v in t.bags[x]:
            bag |= 1 << v
        result = None
        for y in kids[x]:
            table = self.node(t, y, kids)
            have = 0
            for v in t.bags[y]:
                have |= 1 << v
            for v in iter_bits(have & ~bag):
                table = self.forget(table, v)
            have &= bag
            for v in iter_bits(bag & ~have):
                table = self.introduce(table, have, v)
                have |= 1 << v
            result = table if result is None else self.join(result, table)
        if result is None:
            result = {(0, 0, 0): (0, 0)}
            have = 0
            for v in iter_bits(bag):
                result = self.introduce(result, have, v)
                have |= 1 << v
        return result

    def run(self, t: TreeDecomposition) -> dict:
        kids = {i: [] for i in range(len(t))}
        for i, p in enumerate(t.parent):
            if i != p:
                kids[p].append(i)
        if not len(t):
            return {0: (0, 0)}
        table = self.node(t, t.root, kids)
        for v in t.bags[t.root]:
            table = self.forget(table, v)
        final: dict = {}
        for (_, _, cnt), value in table.items():
            _better(final, cnt, value)
        return final


def elimination_decomposition(g: Graph, order=None) -> TreeDecomposition:
    """Tree decomposition from an elimination ordering (greedy minimum degree by default)."""
    n = g.n
    if n == 0:
        return TreeDecomposition.build([()], [0])
    adj = list(g.masks)
    alive = (1 << n) - 1
    if order is None:
        order = []
        while alive:
            v = min(iter_bits(alive), key=lambda x: ((adj[x] & alive).bit_count(), x))
            order.append(v)
            alive &= ~(1 << v)
        alive = (1 << n) - 1
    pos = {v: i for i, v in enumerate(order)}
    bags, later = [], []
    for v in order:
        nb = adj[v] & alive & ~(1 << v)
        for u in iter_bits(nb):
            adj[u] |= nb & ~(1 << u)
        alive &= ~(1 << v)
        bags.append([v, *iter_bits(nb)])
        later.append(min(iter_bits(nb), key=pos.__getitem__) if nb else None)
    parent = [pos[u] if u is not None else None for u in later]
    roots = [i for i, p in enumerate(parent) if p is None]
    for i in roots:
        parent[i] = roots[-1]
    return TreeDecomposition.build(bags, parent)


def _decode(n: int, neg: int) -> tuple[int, ...]:
    rank = -neg
    return tuple(v for v in range(n) if rank >> (n - 1 - v) & 1)


def _checked(g: Graph, td: TreeDecomposition) -> None:
    report = verify_decomposition(g, td)
    if not report.ok:
        raise InvalidDecompositionError(report)


def _best_at_least(final: dict, t: int):
    return min(value for cnt, value in final.items() if cnt >= t)


def solve_pds_dp(inst: PdsInstance, td: TreeDecomposition) -> PdsSolution:
    g = inst.graph
    _checked(g, td)
    final = _Dp(g, inst.t).run(td)
    _, neg = _best_at_least(final, inst.t)
    return _solution(g, _decode(g.n, neg))


def solve_pds_dp_all(g: Graph, td: TreeDecomposition) -> list[PdsSolution]:
    """Optimal solutions for every target 0..n from one uncapped table."""
    _checked(g, td)
    final = _Dp(g, g.n).run(td)
    return [_solution(g, _decode(g.n, _best_at_least(final, t)[1])) for t in range(g.n + 1)]


def max_coverage_dp(g: Graph, k: int, td: TreeDecomposition) -> PdsSolution:
    """Most vertices dominated by at most ``k`` chosen ones; least witness among optimal-size sets."""
    if k < 0:
        raise ValueError("k must be non-negative")
    sols = solve_pds_dp_all(g, td)
    return max((s for s in sols if s.size <= k), key=lambda s: s.dominated_count)
