"""Tree decompositions, torsos, and the torso constraint they must satisfy.

A torso constraint is a disjunction: a torso is acceptable when it excludes a
given pattern as a minor, or when removing at most ``apex`` vertices leaves
every remaining vertex with degree at most ``degree``.  Decompositions are
produced by a separator-based recursion and certified by
:func:`verify_decomposition` before they are returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .config import Ceilings, SizeLimitError, ceilings
from .graph import Graph, GraphInputError, components_mask, induced_subgraph, iter_bits, to_mask
from .oracles import MinorModel, find_minor

VIOLATION_KINDS = (
    "structure",
    "coverage",
    "edge-coverage",
    "connectivity",
    "torso-minor",
    "torso-degree",
    "invariance",
    "unverifiable",
    "witness",
)


@dataclass(frozen=True)
class TorsoConstraint:
    excluded_minor: Graph | None = None
    apex: int = 0
    degree: int | None = None

    def __post_init__(self):
        if self.excluded_minor is None and self.degree is None:
            raise ValueError("torso constraint needs an excluded minor or a degree bound")
        if self.apex < 0 or (self.degree is not None and self.degree < 0):
            raise ValueError("apex budget and degree bound must be non-negative")

    def to_json(self) -> dict:
        h = self.excluded_minor
        return {
            "excluded_minor": None if h is None else {"n": h.n, "edges": [list(e) for e in h.sorted_edges()]},
            "apex": self.apex,
            "degree": self.degree,
        }


@dataclass(frozen=True)
class Budget:
    max_bag_size: int | None = None
    max_adhesion: int | None = None


@dataclass(frozen=True)
class TreeDecomposition:
    """Rooted tree of bags; ``parent[root] == root``."""

    bags: tuple[tuple[int, ...], ...]
    parent: tuple[int, ...]

    @classmethod
    def build(cls, bags: Iterable[Iterable[int]], parent: Iterable[int]) -> "TreeDecomposition":
        return cls(tuple(tuple(sorted(set(b))) for b in bags), tuple(parent))

    def __len__(self) -> int:
        return len(self.bags)

    @property
    def root(self) -> int:
        return next(i for i, p in enumerate(self.parent) if i == p)

    def children(self, node: int) -> list[int]:
        return [i for i, p in enumerate(self.parent) if p == node and i != node]

    def adhesion(self, node: int) -> tuple[int, ...]:
        """``bag(node) & bag(parent(node))``; empty for the root."""
        p = self.parent[node]
        if p == node:
            return ()
        other = set(self.bags[p])
        return tuple(v for v in self.bags[node] if v in other)

    def to_json(self, graph_ref: str | None = None) -> dict:
        return {
            "nodes": [{"id": i, "bag": list(b), "parent": p} for i, (b, p) in enumerate(zip(self.bags, self.parent))],
            "graph_ref": graph_ref,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TreeDecomposition":
        nodes = sorted(data["nodes"], key=lambda nd: nd["id"])
        if [nd["id"] for nd in nodes] != list(range(len(nodes))):
            raise ValueError("decomposition node ids must be 0..k-1")
        return cls.build((nd["bag"] for nd in nodes), (nd["parent"] for nd in nodes))


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: dict

    def to_json(self) -> dict:
        return {"kind": self.kind, "witness": self.witness}


@dataclass(frozen=True)
class VerificationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> list[str]:
        return sorted({v.kind for v in self.violations}, key=VIOLATION_KINDS.index)

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}


class InvalidDecompositionError(ValueError):
    def __init__(self, report: VerificationReport):
        super().__init__("invalid decomposition: " + ", ".join(report.kinds()))
        self.report = report


@dataclass
class DecompositionNotFound(RuntimeError):
    """The search ran out of acceptable separators within the budget."""

    partial: TreeDecomposition
    offending_part: tuple[int, ...]
    boundary: tuple[int, ...] = field(default=())

    def __str__(self) -> str:
        return f"no decomposition found; stuck on part {list(self.offending_part)} with boundary {list(self.boundary)}"


# --- torsos and the constraint -----------------------------------------------

def torso_graph(g: Graph, bag: Iterable[int], cliques: Iterable[Iterable[int]]) -> Graph:
    """Induced subgraph on ``bag`` (relabeled in sorted order) plus a clique on each given set."""
    sub, index = induced_subgraph(g, bag)
    extra = []
    for c in cliques:
        local = sorted(index[v] for v in c)
        extra.extend(itertools.combinations(local, 2))
    return Graph(sub.n, itertools.chain(sub.edges, extra))


def _structure_problems(t: TreeDecomposition, n: int) -> list[Violation]:
    out = []
    k = len(t.bags)
    if len(t.parent) != k or k == 0:
        return [Violation("structure", {"detail": "bags and parents differ in length or are empty"})]
    for i, p in enumerate(t.parent):
        if not 0 <= p < k:
            out.append(Violation("structure", {"node": i, "detail": f"parent {p} out of range"}))
    for i, b in enumerate(t.bags):
        bad = [v for v in b if not 0 <= v < n]
        if bad:
            out.append(Violation("structure", {"node": i, "detail": f"vertices {bad} out of range"}))
    if out:
        return out
    roots = [i for i, p in enumerate(t.parent) if i == p]
    if len(roots) != 1:
        return [Violation("structure", {"roots": roots, "detail": "expected exactly one root"})]
    for i in range(k):
        seen = set()
        v = i
        while t.parent[v] != v:
            if v in seen:
                return [Violation("structure", {"node": i, "detail": "parent pointers form a cycle"})]
            seen.add(v)
            v = t.parent[v]
    return []


def torso(g: Graph, t: TreeDecomposition, node: int) -> Graph:
    """Torso of ``node``; vertex ``i`` of the result is ``t.bags[node][i]``."""
    report = verify_decomposition(g, t)
    if not report.ok:
        raise InvalidDecompositionError(report)
    if not 0 <= node < len(t.bags):
        raise GraphInputError(f"no node {node} in decomposition")
    return _torso_unchecked(g, t, node)


def _torso_unchecked(g: Graph, t: TreeDecomposition, node: int) -> Graph:
    cliques = [t.adhesion(node)] + [t.adhesion(c) for c in t.children(node)]
    return torso_graph(g, t.bags[node], cliques)


def apex_set(h: Graph, apex: int, degree: int) -> tuple[int, ...] | None:
    """Smallest (then lexicographically least) set ``A`` with ``|A| <= apex`` and max degree of ``h - A`` at most ``degree``.

    Some vertex of the closed neighbourhood of any vertex still above the bound
    must be removed, which gives a bounded search tree.
    """
    masks = h.masks
    full = (1 << h.n) - 1

    def violator(removed: int) -> int | None:
        alive = full & ~removed
        for v in iter_bits(alive):
            if (masks[v] & alive).bit_count() > degree:
                return v
        return None

    for size in range(apex + 1):
        found: list[int] = []

        def search(removed: int, left: int) -> None:
            v = violator(removed)
            if v is None:
                found.append(removed)
                return
            if left == 0:
                return
            for u in iter_bits((masks[v] | (1 << v)) & ~removed):
                search(removed | (1 << u), left - 1)

        search(0, size)
        if found:
            # smaller sizes already failed, so every set found here has exactly `size` members
            return min(tuple(iter_bits(r)) for r in found)
    return None


def torso_violations(h: Graph, bag: tuple[int, ...], c: TorsoConstraint, node: int | None = None,
                     limits: Ceilings | None = None) -> list[Violation]:
    """Violations of ``c`` for one torso ``h`` whose vertex ``i`` is ``bag[i]``; empty when acceptable."""
    degree_failure = None
    if c.degree is not None:
        if apex_set(h, c.apex, c.degree) is not None:
            return []
        high = [bag[v] for v in range(h.n) if h.degree(v) > c.degree]
        degree_failure = Violation("torso-degree", {
            "node": node, "high_degree": high, "apex_budget": c.apex, "degree_bound": c.degree,
        })
    if c.excluded_minor is None:
        return [degree_failure]
    try:
        model = find_minor(c.excluded_minor, h, limits)
    except SizeLimitError as exc:
        out = [Violation("unverifiable", {"node": node, "detail": str(exc)})]
        return out + ([degree_failure] if degree_failure else [])
    if model is None:
        return []
    lifted = MinorModel(tuple(tuple(bag[v] for v in b) for b in model.branch_sets))
    out = [Violation("torso-minor", {"node": node, "branch_sets": [list(b) for b in lifted.branch_sets]})]
    return out + ([degree_failure] if degree_failure else [])


def verify_decomposition(g: Graph, t: TreeDecomposition, c: TorsoConstraint | None = None,
                         limits: Ceilings | None = None) -> VerificationReport:
    """Check the tree-decomposition axioms and, when ``c`` is given, the torso constraint at every node."""
    problems = _structure_problems(t, g.n)
    if problems:
        return VerificationReport(tuple(problems))
    out: list[Violation] = []
    bagsets = [set(b) for b in t.bags]
    covered = set().union(*bagsets)
    for v in range(g.n):
        if v not in covered:
            out.append(Violation("coverage", {"vertex": v}))
    for u, v in g.sorted_edges():
        if not any(u in b and v in b for b in bagsets):
            out.append(Violation("edge-coverage", {"edge": [u, v]}))
    for v in sorted(covered):
        holders = [i for i, b in enumerate(bagsets) if v in b]
        tops = [i for i in holders if t.parent[i] == i or v not in bagsets[t.parent[i]]]
        if len(tops) > 1:
            out.append(Violation("connectivity", {"vertex": v, "nodes": holders}))
    if out or c is None:
        return VerificationReport(tuple(out))
    for node in range(len(t.bags)):
        h = _torso_unchecked(g, t, node)
        out.extend(torso_violations(h, t.bags[node], c, node, limits))
    return VerificationReport(tuple(out))


# --- separators ---------------------------------------------------------------

def _balanced(masks, within: int, removed: int, wmask: int) -> bool:
    total = wmask.bit_count()
    return all(2 * (comp & wmask).bit_count() <= total for comp in components_mask(masks, within & ~removed))


def find_separator(g: Graph, w: Iterable[int], max_size: int) -> tuple[int, ...] | None:
    """Least (by size, then lexicographically) ``S`` with ``|S| <= max_size`` such that no component of ``g - S`` holds more than half of ``w``."""
    wl = sorted(set(w))
    if any(not 0 <= v < g.n for v in wl):
        raise GraphInputError("separator target set has vertices outside the graph")
    wmask = to_mask(wl)
    full = (1 << g.n) - 1
    for size in range(min(max_size, g.n) + 1):
        for s in itertools.combinations(range(g.n), size):
            if _balanced(g.masks, full, to_mask(s), wmask):
                return s
    return None


# --- the separator recursion shared with the treelike decomposer -------------

@dataclass(frozen=True)
class Split:
    tier: int                 # 0 balanced, 1 unbalanced fallback
    separator: tuple[int, ...]
    bag: int                  # mask
    children: tuple[tuple[int, int], ...]  # (part mask, boundary mask)


class PartEngine:
    """Enumerates how a part ``(P, B)`` of the graph may be handled.

    A part is a vertex set ``P`` with boundary ``B`` (its adhesion with the
    parent bag).  It is either a leaf, when ``G[P]`` plus a clique on ``B`` is an
    acceptable bag, or split by a separator ``S`` of ``P - B`` into the bag
    ``B | S`` and one child part per component ``C`` of ``P - (B | S)``,
    namely ``C`` plus its neighbours in the bag.
    """

    def __init__(self, g: Graph, c: TorsoConstraint, budget: Budget | None = None,
                 limits: Ceilings | None = None):
        self.g = g
        self.c = c
        self.budget = budget or Budget()
        self.limits = limits or ceilings()
        self._bag_memo: dict[tuple[int, tuple[int, ...]], bool] = {}

    def bag_ok(self, bag: int, cliques: Iterable[int]) -> bool:
        if self.budget.max_bag_size is not None and bag.bit_count() > self.budget.max_bag_size:
            return False
        key = (bag, tuple(sorted(set(m for m in cliques if m.bit_count() > 1))))
        hit = self._bag_memo.get(key)
        if hit is None:
            verts = tuple(iter_bits(bag))
            h = torso_graph(self.g, verts, (tuple(iter_bits(m)) for m in key[1]))
            hit = not torso_violations(h, verts, self.c, limits=self.limits)
            self._bag_memo[key] = hit
        return hit

    def leaf_ok(self, part: int, boundary: int) -> bool:
        return self.bag_ok(part, (boundary,))

    def splits(self, part: int, boundary: int):
        """Admissible splits, generated lazily in (tier, separator size, separator) order."""
        masks = self.g.masks
        inner = part & ~boundary
        inner_list = list(iter_bits(inner))
        total = len(inner_list)
        limit = self.budget.max_adhesion
        for tier in (0, 1):
            for size in range(total + 1):
                for sep in itertools.combinations(inner_list, size):
                    smask = to_mask(sep)
                    comps = components_mask(masks, inner & ~smask)
                    balanced = all(2 * comp.bit_count() <= total for comp in comps)
                    if balanced != (tier == 0):
                        continue
                    bag = boundary | smask
                    children = []
                    for comp in comps:
                        adh = _neighborhood_in(masks, comp, bag)
                        child = comp | adh
                        if child.bit_count() >= part.bit_count():
                            break  # no progress
                        if limit is not None and adh.bit_count() > limit:
                            break
                        children.append((child, adh))
                    else:
                        if self.bag_ok(bag, [boundary] + [a for _, a in children]):
                            yield Split(tier, sep, bag, tuple(children))


def _neighborhood_in(masks, comp: int, within: int) -> int:
    nb = 0
    for v in iter_bits(comp):
        nb |= masks[v]
    return nb & within


# --- the tree decomposer -------------------------------------------------------

class _Node:
    __slots__ = ("bag", "children")

    def __init__(self, bag: int, children: list["_Node"]):
        self.bag = bag
        self.children = children


def _flatten(root: _Node) -> tuple[list[int], list[int]]:
    bags: list[int] = []
    parent: list[int] = []
    stack = [(root, -1)]
    while stack:
        node, par = stack.pop()
        idx = len(bags)
        bags.append(node.bag)
        parent.append(idx if par < 0 else par)
        for ch in reversed(node.children):
            stack.append((ch, idx))
    return bags, parent


def _merge_subset_bags(bags: list[int], parent: list[int]) -> TreeDecomposition:
    """Contract every tree edge whose non-empty end bag is contained in the other end.

    A contained bag's adhesion cliques already lie inside the containing bag's
    torso, so torsos of the surviving nodes do not change.
    """
    bags, parent = list(bags), list(parent)
    alive = [True] * len(bags)
    changed = True
    while changed:
        changed = False
        for i in range(len(bags)):
            p = parent[i]
            if not alive[i] or p == i:
                continue
            if bags[i] and bags[i] & ~bags[p] == 0:
                gone, keep = i, p
            elif bags[p] and bags[p] & ~bags[i] == 0:
                gone, keep = p, i
                parent[i] = i if parent[p] == p else parent[p]
            else:
                continue
            for j in range(len(bags)):
                if alive[j] and j != gone and parent[j] == gone:
                    parent[j] = keep
            alive[gone] = False
            changed = True
            break
    # renumber in preorder, children in original index order
    kids: dict[int, list[int]] = {}
    root = -1
    for i in range(len(bags)):
        if not alive[i]:
            continue
        if parent[i] == i:
            root = i
        else:
            kids.setdefault(parent[i], []).append(i)
    order: list[int] = []
    stack = [root]
    while stack:
        i = stack.pop()
        order.append(i)
        stack.extend(reversed(kids.get(i, [])))
    index = {old: new for new, old in enumerate(order)}
    return TreeDecomposition(
        tuple(tuple(iter_bits(bags[i])) for i in order),
        tuple(index[parent[i]] for i in order),
    )


def decompose(g: Graph, c: TorsoConstraint, budget: Budget | None = None,
              limits: Ceilings | None = None) -> TreeDecomposition:
    """Tree decomposition of ``g`` whose every torso satisfies ``c``.

    Raises :class:`DecompositionNotFound` when no separator sequence within the
    budget works; the exception carries a partial decomposition.
    """
    engine = PartEngine(g, c, budget, limits)
    full = (1 << g.n) - 1
    if g.n == 0:
        return TreeDecomposition(((),), (0,))
    memo: dict[tuple[int, int], _Node | None] = {}
    stuck: list[tuple[int, int]] = []

    def solve(part: int, boundary: int) -> _Node | None:
        key = (part, boundary)
        if key in memo:
            node = memo[key]
            return None if node is None else _copy(node)
        result = None
        if engine.leaf_ok(part, boundary):
            result = _Node(part, [])
        else:
            for split in engine.splits(part, boundary):
                kids = []
                for child, adh in split.children:
                    sub = solve(child, adh)
                    if sub is None:
                        break
                    kids.append(sub)
                else:
                    result = _Node(split.bag, kids)
                    break
        if result is None and not stuck:
            stuck.append(key)
        memo[key] = result
        return None if result is None else _copy(result)

    def partial(part: int, boundary: int) -> _Node:
        node = memo.get((part, boundary))
        if node is not None:
            return _copy(node)
        first = next(engine.splits(part, boundary), None)
        if first is None:
            return _Node(part, [])
        return _Node(first.bag, [partial(ch, adh) for ch, adh in first.children])

    comps = components_mask(g.masks, full)
    if engine.leaf_ok(full, 0):
        root = _Node(full, [])
    elif len(comps) > 1:
        subs = [solve(comp, 0) for comp in comps]
        if any(s is None for s in subs):
            _raise_not_found(g, stuck, _Node(0, [partial(comp, 0) for comp in comps]))
        root = _Node(0, subs)
    else:
        root = solve(full, 0)
        if root is None:
            _raise_not_found(g, stuck, partial(full, 0))
    t = _merge_subset_bags(*_flatten(root))
    report = verify_decomposition(g, t, c, limits)
    if not report.ok:  # pragma: no cover - construction guarantees validity
        raise InvalidDecompositionError(report)
    return t


def _copy(node: _Node) -> _Node:
    return _Node(node.bag, [_copy(ch) for ch in node.children])


def _raise_not_found(g: Graph, stuck, partial_root: _Node):
    part, boundary = stuck[0] if stuck else ((1 << g.n) - 1, 0)
    bags, parent = _flatten(partial_root)
    raise DecompositionNotFound(TreeDecomposition(tuple(tuple(iter_bits(b)) for b in bags), tuple(parent)), tuple(iter_bits(part)), tuple(iter_bits(boundary)))
