"""Text encodings of graphs: graph6 and the ``n=`` edge-list format."""

from __future__ import annotations

from .graph import Graph

GRAPH6_HEADER = ">>graph6<<"


class GraphFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, offset: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.offset = offset


def _g6_size(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))


def emit_graph6(g: Graph) -> str:
    bits = [1 if g.has_edge(i, j) else 0 for j in range(1, g.n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    body = "".join(
        chr(63 + int("".join(map(str, bits[k:k + 6])), 2)) for k in range(0, len(bits), 6)
    )
    return _g6_size(g.n) + body + "\n"


def parse_graph6(text: str) -> Graph:
    s = text.strip()
    if s.startswith(GRAPH6_HEADER):
        s = s[len(GRAPH6_HEADER):]
    if not s:
        raise GraphFormatError("empty graph6 string", line=1, offset=0)
    for i, ch in enumerate(s):
        if not 63 <= ord(ch) <= 126:
            raise GraphFormatError(f"invalid graph6 byte {ch!r}", line=1, offset=i)
    vals = [ord(ch) - 63 for ch in s]
    if vals[0] != 63:
        n, pos = vals[0], 1
    elif len(vals) > 1 and vals[1] == 63:
        if len(vals) < 8:
            raise GraphFormatError("truncated graph6 size field", line=1, offset=len(vals))
        n, pos = 0, 8
        for v in vals[2:8]:
            n = (n << 6) | v
    else:
        if len(vals) < 4:
            raise GraphFormatError("truncated graph6 size field", line=1, offset=len(vals))
        n, pos = 0, 4
        for v in vals[1:4]:
            n = (n << 6) | v
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    if len(vals) - pos != need:
        raise GraphFormatError(
            f"graph6 body has {len(vals) - pos} bytes, expected {need} for n={n}",
            line=1, offset=pos,
        )
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            byte = vals[pos + k // 6]
            if byte >> (5 - k % 6) & 1:
                edges.append((i, j))
            k += 1
    return Graph(n, edges)


def emit_edge_list(g: Graph) -> str:
    lines = [f"n={g.n}"] + [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    lines = text.split("\n")
    if not lines or not lines[0].startswith("n="):
        raise GraphFormatError("missing 'n=<count>' header", line=1, offset=0)
    try:
        n = int(lines[0][2:].strip())
    except ValueError:
        raise GraphFormatError("vertex count is not an integer", line=1, offset=2) from None
    if n < 0:
        raise GraphFormatError("negative vertex count", line=1, offset=2)
    edges = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"expected '<u> <v>', got {line!r}", line=lineno, offset=0)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer endpoint in {line!r}", line=lineno, offset=0) from None
        if u == v:
            raise GraphFormatError(f"self-loop at {u}", line=lineno, offset=0)
        if u > v:
            raise GraphFormatError(f"endpoints must satisfy u < v, got {u} {v}", line=lineno, offset=0)
        if v >= n or u < 0:
            raise GraphFormatError(f"endpoint out of range for n={n}", line=lineno, offset=line.index(parts[1]))
        if (u, v) in edges:
            raise GraphFormatError(f"duplicate edge {u} {v}", line=lineno, offset=0)
        edges.add((u, v))
    return Graph(n, edges)


FORMATS = {"graph6": (parse_graph6, emit_graph6), "edge-list": (parse_edge_list, emit_edge_list)}
EXTENSIONS = {".g6": "graph6", ".edges": "edge-list"}


def _codec(format: str):
    if format not in FORMATS:
        raise ValueError(f"unknown graph format {format!r}")
    return FORMATS[format]


def parse_graph(text: str, format: str = "edge-list") -> Graph:
    return _codec(format)[0](text)


def emit_graph(g: Graph, format: str = "edge-list") -> str:
    return _codec(format)[1](g)
