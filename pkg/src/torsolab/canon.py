"""Canonical forms of coloured graphs, lifted along treelike decompositions.

A canonical form is the least serialization of a graph over all
colour-preserving relabelings.  The serialization is fixed and bit-exact:

    b"G" | varint n | varint colour per label | varint trace value per label |
    upper-triangle adjacency bits, row by row, packed MSB first |
    varint block count | blocks

The trace value of label j is the colour-refinement cell rank of that vertex
once labels 0..j-1 have been individualized.  It is determined by the
labelled graph, so it adds no information, but putting it ahead of the
adjacency bits lets the search follow an individualization-refinement tree.
Blocks only appear in the codes used while lifting; a block records the
labels of an adhesion set and the code of the part attached through it.
The empty graph serializes to the empty string.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .config import Ceilings, SizeLimitError, ceilings
from .decomposition import Budget, InvalidDecompositionError, TorsoConstraint
from .graph import Graph, iter_bits
from .treelike import TreelikeDecomposition, invariant_decompose, verify_invariance, verify_treelike

NO_BLOCKS = b"\x00"


def varint(x: int) -> bytes:
    out = bytearray()
    while True:
        byte = x & 0x7F
        x >>= 7
        if x:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


@dataclass(frozen=True)
class ColoredGraph:
    graph: Graph
    colors: tuple[int, ...]

    def __post_init__(self):
        if len(self.colors) != self.graph.n or any(c < 0 for c in self.colors):
            raise ValueError("every vertex needs a non-negative colour")

    @classmethod
    def uniform(cls, g: Graph) -> "ColoredGraph":
        return cls(g, (0,) * g.n)


@dataclass(frozen=True)
class CanonicalForm:
    certificate: bytes
    witness: tuple[int, ...]  # input vertex -> canonical label

    def hex(self) -> str:
        return self.certificate.hex()


def refine(masks: Sequence[int], keys: Sequence) -> list[int]:
    """Colour refinement to the coarsest stable partition below ``keys``.

    Cells are numbered so that the numbering depends only on the structure:
    a cell's rank comes from its sorted signature, and cells of a finer
    round stay ordered inside the cell they split from.
    """
    distinct = sorted(set(keys))
    rank = {k: i for i, k in enumerate(distinct)}
    col = [rank[k] for k in keys]
    ncol = len(distinct)
    while ncol < len(col):
        sig = [(c, tuple(sorted(col[u] for u in iter_bits(m)))) for c, m in zip(col, masks)]
        distinct = sorted(set(sig))
        if len(distinct) == ncol:
            break
        rank = {s: i for i, s in enumerate(distinct)}
        col = [rank[s] for s in sig]
        ncol = len(distinct)
    return col


def individualize(masks: Sequence[int], part: Sequence[int], v: int) -> list[int]:
    return refine(masks, [(c, x != v) for x, c in enumerate(part)])


def trace(masks: Sequence[int], colors: Sequence[int], order: Sequence[int]) -> list[int]:
    """Cell rank of each vertex of ``order`` at the moment it is individualized."""
    part = refine(masks, colors)
    out = []
    for v in order:
        out.append(part[v])
        part = individualize(masks, part, v)
    return out


def _adjacency(masks: Sequence[int], order: Sequence[int]) -> bytes:
    acc = 0
    nbits = 0
    for i, u in enumerate(order):
        row = masks[u]
        for v in order[i + 1:]:
            acc = (acc << 1) | (row >> v & 1)
        nbits += len(order) - i - 1
    pad = -nbits % 8
    return (acc << pad).to_bytes((nbits + pad) // 8, "big")


def _encode(masks, colors, order, tr, extra: bytes) -> bytes:
    if not order and extra == NO_BLOCKS:
        return b""
    return (b"G" + varint(len(order)) + b"".join(varint(colors[v]) for v in order)
            + b"".join(varint(t) for t in tr) + _adjacency(masks, order) + extra)


def serialize(g: Graph, colors: Sequence[int] | None = None, extra: bytes = NO_BLOCKS) -> bytes:
    """Serialization of ``g`` in its current labeling."""
    colors = list(colors) if colors is not None else [0] * g.n
    order = range(g.n)
    return _encode(g.masks, colors, order, trace(g.masks, colors, order), extra)


class _Search:
    """Exact search for the least serialization.

    Labels are handed out in order.  Only vertices of the least cell of the
    current refined partition can take the next label, and a branch whose
    trace already exceeds the best leaf's is cut.  Leaves with equal
    serializations expose automorphisms, which prune sibling branches lying
    in one orbit.  With ``probe`` the search also follows a refinement path
    below a second tied candidate before exploring it, and when the leaf it
    reaches matches the first candidate's leaf, records the automorphism and
    skips the branch.
    """

    def __init__(self, masks: Sequence[int], colors: Sequence[int],
                 extra: Callable[[Sequence[int]], bytes] | None, probe: bool):
        self.n = len(colors)
        self.masks = masks
        self.colors = colors
        self.extra = extra or (lambda seq: NO_BLOCKS)
        self.probe = probe
        self.best_seq: list[int] | None = None
        self.best_trace: list[int] = []
        self.best_rest = b""
        self.generators: list[tuple[int, ...]] = []
        self.seq: list[int] = []
        self.trace: list[int] = []

    def run(self) -> tuple[list[int], bytes]:
        self._rec(refine(self.masks, self.colors), False)
        return self.best_seq, self._encode(self.best_seq, self.best_trace, self.best_rest)

    def _encode(self, seq, tr, rest: bytes) -> bytes:
        return (b"G" + varint(self.n) + b"".join(varint(self.colors[v]) for v in seq)
                + b"".join(varint(t) for t in tr) + rest)

    def _rest(self, seq: Sequence[int]) -> bytes:
        return _adjacency(self.masks, seq) + self.extra(seq)

    def _leaf(self, tight: bool) -> bool:
        rest = self._rest(self.seq)
        if tight:
            if rest > self.best_rest:
                return False
            if rest == self.best_rest:
                gamma = [0] * self.n
                for a, b in zip(self.best_seq, self.seq):
                    gamma[a] = b
                self.generators.append(tuple(gamma))
                return False
        self.best_seq = list(self.seq)
        self.best_trace = list(self.trace)
        self.best_rest = rest
        return True

    def _same_orbit(self, w: int, explored: list[int]) -> bool:
        fixed = self.seq
        gens = [gm for gm in self.generators if all(gm[v] == v for v in fixed)]
        if not gens:
            return False
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for gm in gens:
            for v in range(self.n):
                a, b = find(v), find(gm[v])
                if a != b:
                    parent[a] = b
        root = find(w)
        return any(find(u) == root for u in explored)

    def _descend(self, part: list[int], v: int) -> list[int]:
        order = list(self.seq)
        while True:
            order.append(v)
            part = individualize(self.masks, part, v)
            free = [x for x in range(self.n) if x not in order]
            if not free:
                return order
            m = min(part[x] for x in free)
            v = min(x for x in free if part[x] == m)

    def _probe(self, part: list[int], u: int, w: int) -> bool:
        lu = self._descend(part, u)
        lw = self._descend(part, w)
        tu = trace(self.masks, self.colors, lu)
        if tu != trace(self.masks, self.colors, lw) or self._rest(lu) != self._rest(lw):
            return False
        if [self.colors[x] for x in lu] != [self.colors[x] for x in lw]:
            return False
        gamma = [0] * self.n
        for a, b in zip(lu, lw):
            gamma[a] = b
        self.generators.append(tuple(gamma))
        return True

    def _rec(self, part: list[int], tight: bool) -> bool:
        j = len(self.seq)
        if j == self.n:
            return self._leaf(tight)
        taken = set(self.seq)
        m = min(c for v, c in enumerate(part) if v not in taken)
        if tight:
            if m > self.best_trace[j]:
                return False
            child_tight = m == self.best_trace[j]
        else:
            child_tight = False
        updated = False
        explored: list[int] = []
        for w in [v for v, c in enumerate(part) if c == m and v not in taken]:
            if explored:
                if self._same_orbit(w, explored):
                    continue
                if self.probe and self._probe(part, explored[0], w):
                    continue
            self.seq.append(w)
            self.trace.append(m)
            if self._rec(individualize(self.masks, part, w), child_tight):
                updated = True
                child_tight = True
            self.trace.pop()
            self.seq.pop()
            explored.append(w)
        return updated


def _witness(seq: Sequence[int]) -> tuple[int, ...]:
    w = [0] * len(seq)
    for label, v in enumerate(seq):
        w[v] = label
    return tuple(w)


def _run(cg: ColoredGraph, extra, probe: bool) -> tuple[list[int], bytes]:
    if cg.graph.n == 0:
        return [], _encode((), (), (), (), extra([]) if extra else NO_BLOCKS)
    return _Search(cg.graph.masks, cg.colors, extra, probe).run()


def canonise_small(cg: ColoredGraph, limits: Ceilings | None = None) -> CanonicalForm:
    """Least serialization over all colour-preserving relabelings, for graphs within the exhaustive ceiling."""
    limits = limits or ceilings()
    if cg.graph.n > limits.exhaustive:
        raise SizeLimitError(f"{cg.graph.n} vertices exceeds the exhaustive canoniser ceiling {limits.exhaustive}")
    seq, cert = _run(cg, None, False)
    return CanonicalForm(cert, _witness(seq))


def canonise_refined(cg: ColoredGraph) -> CanonicalForm:
    """Same certificate as :func:`canonise_small` without the size ceiling; probes refinement paths for automorphisms."""
    seq, cert = _run(cg, None, True)
    return CanonicalForm(cert, _witness(seq))


def _dispatch(cg: ColoredGraph, extra, limits: Ceilings) -> tuple[list[int], bytes]:
    return _run(cg, extra, cg.graph.n > limits.exhaustive)


def canonise_torso(torso: Graph, adhesion_coloring: Mapping[int, int] | None = None,
                   c: TorsoConstraint | None = None, limits: Ceilings | None = None) -> CanonicalForm:
    """Canonise a torso whose vertices carry adhesion colours (absent vertices get colour 0).

    Torsos within the exhaustive ceiling go to :func:`canonise_small`, larger
    ones to :func:`canonise_refined`.  Apices and bounded-degree vertices are
    treated alike, so ``c`` does not change the result.
    """
    limits = limits or ceilings()
    coloring = adhesion_coloring or {}
    cg = ColoredGraph(torso, tuple(coloring.get(v, 0) for v in range(torso.n)))
    if torso.n <= limits.exhaustive:
        return canonise_small(cg, limits)
    return canonise_refined(cg)


# --- lifting --------------------------------------------------------------------

class _Lifter:
    def __init__(self, g: Graph, d: TreelikeDecomposition, limits: Ceilings):
        self.g = g
        self.d = d
        self.limits = limits
        self.kids = {i: d.children(i) for i in range(len(d.nodes))}
        self.memo: dict[tuple[int, tuple[int, ...], bool], tuple[bytes, list[int]]] = {}

    def code(self, i: int, boundary: tuple[int, ...], ordered: bool) -> tuple[bytes, list[int]]:
        """Code of the part below node ``i`` with the given boundary, plus its canonical vertex order.

        With ``ordered`` the boundary vertices are individualized in the given
        order and open the canonical order; otherwise they share one colour.
        """
        key = (i, boundary, ordered)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        nd = self.d.nodes[i]
        if nd.role == "choice":
            best = None
            for k in self.kids[i]:
                cand = self.code(k, boundary, ordered)
                if best is None or cand[0] < best[0]:
                    best = cand
            self.memo[key] = best
            return best
        bag = nd.bag
        local = {v: x for x, v in enumerate(bag)}
        attach = []
        for k in self.kids[i]:
            adh = tuple(v for v in self.d.nodes[k].scope if v in local)
            attach.append((k, adh))
        through: dict[int, list[bytes]] = {v: [] for v in bag}
        for k, adh in attach:
            u = self.code(k, adh, False)[0]
            for v in adh:
                through[v].append(u)
        bpos = {v: p for p, v in enumerate(boundary)}
        keys = []
        for v in bag:
            ms = tuple(sorted(through[v]))
            if v in bpos:
                keys.append((0, bpos[v] if ordered else 0, ms))
            else:
                keys.append((1, 0, ms))
        distinct = sorted(set(keys))
        rank = {k: r for r, k in enumerate(distinct)}
        colors = tuple(rank[k] for k in keys)
        sub = Graph(len(bag), ((local[u], local[v]) for u, v in self.g.edges if u in local and v in local))

        def blocks(seq: Sequence[int]) -> bytes:
            label = {bag[x]: p for p, x in enumerate(seq)}
            items = []
            for k, adh in attach:
                order = tuple(sorted(adh, key=label.__getitem__))
                items.append((tuple(label[v] for v in order), self.code(k, order, True)[0]))
            items.sort()
            out = bytearray(varint(len(items)))
            for labels, code in items:
                out += varint(len(labels)) + b"".join(varint(x) for x in labels)
                out += varint(len(code)) + code
            return bytes(out)

        seq, code = _dispatch(ColoredGraph(sub, colors), blocks if attach else None, self.limits)
        order = [bag[x] for x in seq]
        if attach:
            label = {v: p for p, v in enumerate(order)}
            items = []
            for k, adh in attach:
                adh_order = tuple(sorted(adh, key=label.__getitem__))
                items.append(((tuple(label[v] for v in adh_order), self.code(k, adh_order, True)[0]), k, adh_order))
            items.sort(key=lambda t: t[0])
            placed = set(order)
            for _, k, adh_order in items:
                for v in self.code(k, adh_order, True)[1]:
                    if v not in placed:
                        placed.add(v)
                        order.append(v)
        self.memo[key] = (code, order)
        return code, order


def _lift(g: Graph, d: TreelikeDecomposition, limits: Ceilings) -> CanonicalForm:
    lifter = _Lifter(g, d, limits)
    if len(d.roots) == 1:
        order = lifter.code(d.roots[0], (), True)[1]
    else:
        parts = sorted((lifter.code(r, (), True) for r in d.roots), key=lambda t: t[0])
        order = [v for _, o in parts for v in o]
    witness = _witness(order)
    cert = serialize(g.relabel(witness))
    return CanonicalForm(cert, witness)


def lift_canonisation(g: Graph, d: TreelikeDecomposition, c: TorsoConstraint | None = None,
                      limits: Ceilings | None = None) -> CanonicalForm:
    """Canonical form of ``g`` assembled bottom-up from torso canonisations along ``d``.

    Each node's bag is canonised with its boundary individualized, the other
    adhesion vertices coloured by the codes of the parts hanging off them, and
    the ordered codes of those parts appended as blocks.  A choice node takes
    the least code among its alternatives.  The resulting canonical order is
    returned as the witness, and the certificate is the serialization of ``g``
    relabeled by it.
    """
    limits = limits or ceilings()
    report = verify_treelike(g, d)
    if report.ok:
        inv = verify_invariance(g, d, limits)
        if not inv.ok and inv.kinds() != ["unverifiable"]:
            report = inv
    if not report.ok:
        raise InvalidDecompositionError(report)
    return _lift(g, d, limits)


def canonical_form(g: Graph, c: TorsoConstraint, budget: Budget | None = None,
                   limits: Ceilings | None = None) -> CanonicalForm:
    limits = limits or ceilings()
    d = invariant_decompose(g, c, budget, limits)
    form = _lift(g, d, limits)
    if serialize(g.relabel(form.witness)) != form.certificate:  # pragma: no cover - self-check
        raise RuntimeError("canonical witness does not reproduce the certificate")
    return form


def isomorphic(g: Graph, h: Graph, c: TorsoConstraint, budget: Budget | None = None,
               limits: Ceilings | None = None) -> bool:
    if g.n != h.n or g.m != h.m:
        return False
    return canonical_form(g, c, budget, limits).certificate == canonical_form(h, c, budget, limits).certificate
