"""Automorphism-invariant decompositions shaped as DAGs of bags.

The tree decomposer commits to the lexicographically least separator of each
part, which depends on vertex names.  :func:`invariant_decompose` makes no such
choice: it keeps every split in the first admissible (tier, size) group, so
the result is a union of tree decompositions that every automorphism maps to
itself.

Nodes come in three roles.  A ``leaf`` is a part ``P`` accepted whole.  A
``choice`` node stands for a part ``P`` with boundary ``B``; its bag is ``B``
and its children are the ``sep`` nodes ``B | S``, one per kept separator
``S``.  Decompositions converted from ordinary tree decompositions use the
role ``bag``.  Every node also records its ``scope``, the vertex set of the
part it governs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .config import Ceilings, SizeLimitError, ceilings
from .decomposition import (
    Budget,
    DecompositionNotFound,
    PartEngine,
    TorsoConstraint,
    TreeDecomposition,
    VerificationReport,
    Violation,
    decompose,
    verify_decomposition,
)
from .graph import Graph, components_mask, iter_bits, to_mask
from .oracles import automorphisms

ROLES = ("leaf", "choice", "sep", "bag")


@dataclass(frozen=True, order=True)
class DagNode:
    bag: tuple[int, ...]
    role: str
    scope: tuple[int, ...]

    def sort_key(self):
        return (len(self.bag), self.bag, ROLES.index(self.role), len(self.scope), self.scope)

    def image(self, sigma) -> "DagNode":
        return DagNode(tuple(sorted(sigma[v] for v in self.bag)), self.role,
                       tuple(sorted(sigma[v] for v in self.scope)))


@dataclass(frozen=True)
class TreelikeDecomposition:
    """Nodes sorted by (bag size, bag, role, scope); arcs and roots index into ``nodes``."""

    nodes: tuple[DagNode, ...]
    arcs: tuple[tuple[int, int], ...]
    roots: tuple[int, ...]

    @classmethod
    def from_parts(cls, nodes, arcs, roots) -> "TreelikeDecomposition":
        ordered = sorted(set(nodes), key=DagNode.sort_key)
        index = {nd: i for i, nd in enumerate(ordered)}
        return cls(
            tuple(ordered),
            tuple(sorted({(index[p], index[c]) for p, c in arcs})),
            tuple(sorted({index[r] for r in roots})),
        )

    def children(self, i: int) -> list[int]:
        return [c for p, c in self.arcs if p == i]

    def node_set(self) -> frozenset[DagNode]:
        return frozenset(self.nodes)

    def arc_set(self) -> frozenset[tuple[DagNode, DagNode]]:
        return frozenset((self.nodes[p], self.nodes[c]) for p, c in self.arcs)

    def to_json(self) -> dict:
        return {
            "nodes": [
                {"id": i, "bag": list(nd.bag), "role": nd.role, "scope": list(nd.scope)}
                for i, nd in enumerate(self.nodes)
            ],
            "arcs": [list(a) for a in self.arcs],
            "roots": list(self.roots),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "TreelikeDecomposition":
        nodes = sorted(data["nodes"], key=lambda nd: nd["id"])
        if [nd["id"] for nd in nodes] != list(range(len(nodes))):
            raise ValueError("treelike node ids must be 0..k-1")
        objs = [DagNode(tuple(sorted(nd["bag"])), nd.get("role", "bag"), tuple(sorted(nd.get("scope", nd["bag"]))))
                for nd in nodes]
        # keep the stored indexing so that reports refer to the file's ids
        return cls(tuple(objs), tuple(sorted(tuple(a) for a in data["arcs"])), tuple(sorted(data["roots"])))


def from_tree_decomposition(t: TreeDecomposition) -> TreelikeDecomposition:
    """View a tree decomposition as a DAG with role ``bag``; scopes are subtree unions."""
    kids = {i: t.children(i) for i in range(len(t))}
    scope: dict[int, set[int]] = {}

    def fill(i: int) -> set[int]:
        s = set(t.bags[i])
        for c in kids[i]:
            s |= fill(c)
        scope[i] = s
        return s

    fill(t.root)
    node = {i: DagNode(t.bags[i], "bag", tuple(sorted(scope[i]))) for i in range(len(t))}
    arcs = [(node[t.parent[i]], node[i]) for i in range(len(t)) if t.parent[i] != i]
    return TreelikeDecomposition.from_parts(node.values(), arcs, [node[t.root]])


def invariant_decompose(g: Graph, c: TorsoConstraint, budget: Budget | None = None,
                        limits: Ceilings | None = None) -> TreelikeDecomposition:
    """Decompose ``g`` without arbitrary choices.

    Wherever :func:`~torsolab.decomposition.decompose` would take the first
    working separator, every working separator of the same tier and size is
    kept.  Raises :class:`DecompositionNotFound` exactly when the tree
    decomposer does, and :class:`SizeLimitError` past the DAG node ceiling.
    """
    limits = limits or ceilings()
    engine = PartEngine(g, c, budget, limits)
    full = (1 << g.n) - 1
    nodes: set[DagNode] = set()
    arcs: set[tuple[DagNode, DagNode]] = set()
    memo: dict[tuple[int, int], DagNode | None] = {}

    def mk(bag: int, role: str, scope: int) -> DagNode:
        nd = DagNode(tuple(iter_bits(bag)), role, tuple(iter_bits(scope)))
        if nd not in nodes:
            nodes.add(nd)
            if len(nodes) > limits.dag_nodes:
                raise SizeLimitError(f"treelike decomposition exceeds {limits.dag_nodes} nodes")
        return nd

    def resolve(part: int, boundary: int) -> DagNode | None:
        key = (part, boundary)
        if key in memo:
            return memo[key]
        if engine.leaf_ok(part, boundary):
            memo[key] = mk(part, "leaf", part)
            return memo[key]
        kept = []
        group = None
        for split in engine.splits(part, boundary):
            sig = (split.tier, len(split.separator))
            if group is not None and sig != group:
                break
            kids = [resolve(ch, adh) for ch, adh in split.children]
            if all(k is not None for k in kids):
                kept.append((split, kids))
                group = sig
        if not kept:
            memo[key] = None
            return None
        choice = mk(boundary, "choice", part)
        for split, kids in kept:
            sep = mk(split.bag, "sep", part)
            arcs.add((choice, sep))
            for k in kids:
                arcs.add((sep, k))
        memo[key] = choice
        return choice

    if g.n == 0:
        root = mk(0, "leaf", 0)
    elif engine.leaf_ok(full, 0):
        root = mk(full, "leaf", full)
    else:
        comps = components_mask(g.masks, full)
        if len(comps) > 1:
            kids = [resolve(comp, 0) for comp in comps]
            if any(k is None for k in kids):
                decompose(g, c, budget, limits)  # raises with the tree decomposer's partial result
                raise DecompositionNotFound(TreeDecomposition(((),), (0,)), tuple(range(g.n)))  # pragma: no cover
            root = mk(0, "sep", full)
            for k in kids:
                arcs.add((root, k))
        else:
            root = resolve(full, 0)
            if root is None:
                decompose(g, c, budget, limits)
                raise DecompositionNotFound(TreeDecomposition(((),), (0,)), tuple(range(g.n)))  # pragma: no cover
    return TreelikeDecomposition.from_parts(nodes, arcs, [root])


# --- verification ---------------------------------------------------------------

def first_resolution(d: TreelikeDecomposition) -> TreeDecomposition:
    """Tree decomposition obtained by following the first child of every choice node."""
    bags: list[tuple[int, ...]] = []
    parent: list[int] = []

    def walk(i: int, par: int) -> None:
        nd = d.nodes[i]
        kids = d.children(i)
        if nd.role == "choice":
            walk(kids[0], par)
            return
        idx = len(bags)
        bags.append(nd.bag)
        parent.append(idx if par < 0 else par)
        for k in kids:
            walk(k, idx)

    if len(d.roots) == 1:
        walk(d.roots[0], -1)
    else:
        bags.append(())
        parent.append(0)
        for r in d.roots:
            walk(r, 0)
    return TreeDecomposition(tuple(bags), tuple(parent))


def _acyclic(d: TreelikeDecomposition) -> bool:
    state = [0] * len(d.nodes)
    kids = {i: d.children(i) for i in range(len(d.nodes))}

    def visit(i: int) -> bool:
        if state[i] == 1:
            return False
        if state[i] == 2:
            return True
        state[i] = 1
        ok = all(visit(k) for k in kids[i])
        state[i] = 2
        return ok

    return all(visit(i) for i in range(len(d.nodes)))


def verify_treelike(g: Graph, d: TreelikeDecomposition) -> VerificationReport:
    """Acyclicity, coverage, edge coverage, and the per-arc separation conditions.

    The arc conditions make every resolution of the choice nodes a tree
    decomposition of the graph; the first resolution is also checked directly.
    """
    k = len(d.nodes)
    bad = [a for a in d.arcs if not (0 <= a[0] < k and 0 <= a[1] < k)]
    if bad or not d.roots or any(not 0 <= r < k for r in d.roots):
        return VerificationReport((Violation("structure", {"detail": "arc or root index out of range"}),))
    if any(v >= g.n or v < 0 for nd in d.nodes for v in nd.scope + nd.bag):
        return VerificationReport((Violation("structure", {"detail": "vertex out of range"}),))
    if not _acyclic(d):
        return VerificationReport((Violation("structure", {"detail": "arcs contain a cycle"}),))
    out: list[Violation] = []
    covered = set()
    for nd in d.nodes:
        covered.update(nd.bag)
    for v in range(g.n):
        if v not in covered:
            out.append(Violation("coverage", {"vertex": v}))
    bags = [set(nd.bag) for nd in d.nodes]
    for u, v in g.sorted_edges():
        if not any(u in b and v in b for b in bags):
            out.append(Violation("edge-coverage", {"edge": [u, v]}))
    masks = g.masks
    for i, nd in enumerate(d.nodes):
        bag, scope = to_mask(nd.bag), to_mask(nd.scope)
        kids = d.children(i)
        if bag & ~scope:
            out.append(Violation("connectivity", {"node": i, "detail": "bag outside scope"}))
            continue
        if nd.role == "choice":
            if not kids or any(d.nodes[c].scope != nd.scope or to_mask(d.nodes[c].bag) & bag != bag for c in kids):
                out.append(Violation("connectivity", {"node": i, "detail": "choice children must share scope and contain the boundary"}))
            continue
        interiors = 0
        for c in kids:
            ch = d.nodes[c]
            cscope = to_mask(ch.scope)
            interior = cscope & ~bag
            nb = 0
            for v in iter_bits(interior):
                nb |= masks[v]
            if cscope & ~scope or interior & interiors or nb & scope & ~cscope or cscope & bag & ~to_mask(ch.bag):
                out.append(Violation("connectivity", {"node": i, "child": c}))
            interiors |= interior
        if bag | interiors != scope:
            out.append(Violation("connectivity", {"node": i, "detail": "children do not cover the scope"}))
    full = (1 << g.n) - 1
    if to_mask(v for r in d.roots for v in d.nodes[r].scope) != full:
        out.append(Violation("coverage", {"detail": "root scopes do not cover the graph"}))
    if not out:
        tree = verify_decomposition(g, first_resolution(d))
        out.extend(tree.violations)
    return VerificationReport(tuple(out))


def verify_invariance(g: Graph, d: TreelikeDecomposition, limits: Ceilings | None = None) -> VerificationReport:
    """Check that every automorphism of ``g`` maps the node set and arc set onto themselves."""
    try:
        autos = automorphisms(g, limits)
    except SizeLimitError as exc:
        return VerificationReport((Violation("unverifiable", {"detail": str(exc)}),))
    nodes, arcs = d.node_set(), d.arc_set()
    for sigma in autos:
        for nd in d.nodes:
            img = nd.image(sigma)
            if img not in nodes:
                return VerificationReport((Violation("invariance", {
                    "automorphism": list(sigma), "bag": list(nd.bag), "image": list(img.bag),
                }),))
        for p, c in arcs:
            if (p.image(sigma), c.image(sigma)) not in arcs:
                return VerificationReport((Violation("invariance", {
                    "automorphism": list(sigma), "arc": [list(p.bag), list(c.bag)],
                }),))
    return VerificationReport()
