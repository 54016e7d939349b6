"""Command-line front end.

Exit codes: 0 success (or isomorphic), 1 not isomorphic, 2 any error.  Errors
are printed to stderr as a single line ``error: <kind>: <detail>``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .canon import canonical_form, serialize
from .config import Ceilings, SizeLimitError, ceilings, parse_ceilings
from .decomposition import (Budget, DecompositionNotFound, InvalidDecompositionError, TorsoConstraint,
                            TreeDecomposition, VerificationReport, Violation, decompose, verify_decomposition)
from .formats import EXTENSIONS, FORMATS, GraphFormatError, parse_graph
from .graph import Graph, GraphInputError
from .oracles import (MinorModel, TopologicalModel, find_minor, find_topological_subgraph, is_minor_model,
                      is_topological_model)
from .pds import PdsInstance, dominated_count, elimination_decomposition, max_coverage_dp, solve_pds_dp
from .treelike import TreelikeDecomposition, invariant_decompose, verify_invariance, verify_treelike


class CliError(Exception):
    def __init__(self, kind: str, detail: str):
        super().__init__(detail)
        self.kind = kind
        self.detail = detail


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError("input", f"{path}: {exc.strerror or exc}") from None


def read_graph(path: str, fmt: str | None = None) -> Graph:
    if fmt is None:
        suffix = Path(path).suffix
        if suffix == ".json":
            raise CliError("input", f"{path}: expected a graph file, got JSON")
        fmt = EXTENSIONS.get(suffix, "edge-list")
    try:
        return parse_graph(_read_text(path), fmt)
    except GraphFormatError as exc:
        raise CliError("format", f"{path}: {exc}") from None


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise CliError("format", f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _limits(args) -> Ceilings:
    try:
        return parse_ceilings(args.ceiling or "", ceilings())
    except ValueError as exc:
        raise CliError("usage", f"--ceiling: {exc}") from None


def _constraint(args, n: int, required: bool = False) -> TorsoConstraint | None:
    minor = read_graph(args.minor, args.format) if args.minor else None
    if minor is None and args.degree is None:
        if required:
            # no constraint given: accept every torso
            return TorsoConstraint(degree=max(n - 1, 0))
        return None
    return TorsoConstraint(excluded_minor=minor, apex=args.apex, degree=args.degree)


def _budget(args) -> Budget:
    return Budget(max_bag_size=args.max_bag_size, max_adhesion=args.max_adhesion)


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


# --- subcommands ------------------------------------------------------------------

def cmd_decompose(args) -> int:
    g = read_graph(args.graph, args.format)
    c = _constraint(args, g.n, required=True)
    td = decompose(g, c, _budget(args), _limits(args))
    _emit(args, _dumps(td.to_json(graph_ref=Path(args.graph).name)))
    return 0


def cmd_treelike(args) -> int:
    g = read_graph(args.graph, args.format)
    d = invariant_decompose(g, _constraint(args, g.n, required=True), _budget(args), _limits(args))
    _emit(args, _dumps(d.to_json()))
    return 0


def cmd_canon(args) -> int:
    g = read_graph(args.graph, args.format)
    form = canonical_form(g, _constraint(args, g.n, required=True), _budget(args), _limits(args))
    if args.json:
        _emit(args, _dumps({"certificate": form.hex(), "witness": list(form.witness)}))
    else:
        _emit(args, form.hex() + "\n")
    return 0


def cmd_iso(args) -> int:
    g = read_graph(args.graph, args.format)
    h = read_graph(args.other, args.format)
    c = _constraint(args, max(g.n, h.n), required=True)
    limits = _limits(args)
    same = g.n == h.n and (canonical_form(g, c, _budget(args), limits).certificate
                           == canonical_form(h, c, _budget(args), limits).certificate)
    _emit(args, "isomorphic\n" if same else "not isomorphic\n")
    return 0 if same else 1


def cmd_pds(args) -> int:
    g = read_graph(args.graph, args.format)
    if args.decomposition:
        td = _tree_from_json(_read_json(args.decomposition))
    else:
        td = elimination_decomposition(g)
    if args.k is not None:
        sol = max_coverage_dp(g, args.k, td)
        out = {"k": args.k, **sol.to_json()}
    else:
        sol = solve_pds_dp(PdsInstance(g, args.t), td)
        out = {"t": args.t, **sol.to_json()}
    _emit(args, _dumps(out))
    return 0


def _tree_from_json(data) -> TreeDecomposition:
    try:
        return TreeDecomposition.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError("input", f"malformed tree decomposition: {exc}") from None


def _witness_report(problems: list[str], detail: dict) -> VerificationReport:
    return VerificationReport(tuple(Violation("witness", {"reason": p, **detail}) for p in problems))


def _check_model(g: Graph, pattern: Graph, data: dict, limits: Ceilings) -> VerificationReport:
    kind = data.get("type")
    if kind == "minor_model":
        model = MinorModel(tuple(tuple(b) for b in data["branch_sets"]))
        ok = is_minor_model(pattern, g, model)
    elif kind == "topological_model":
        model = TopologicalModel(tuple(data["branch_vertices"]),
                                 tuple((tuple(p["edge"]), tuple(p["path"])) for p in data["paths"]))
        ok = is_topological_model(pattern, g, model)
    else:  # "absent": confirm by searching again
        search = find_minor if data.get("relation") == "minor" else find_topological_subgraph
        ok = search(pattern, g, limits) is None
    return VerificationReport() if ok else _witness_report([f"{kind} does not hold"], {})


def _check_pds(g: Graph, data: dict) -> VerificationReport:
    chosen = data["chosen"]
    problems = []
    if any(not isinstance(v, int) or not 0 <= v < g.n for v in chosen) or len(set(chosen)) != len(chosen):
        return _witness_report(["chosen vertices must be distinct vertices of the graph"], {"chosen": chosen})
    count = dominated_count(g, chosen)
    if data.get("dominated") is not None and data["dominated"] != count:
        problems.append(f"dominated count is {count}, not {data['dominated']}")
    if data.get("size") is not None and data["size"] != len(chosen):
        problems.append(f"size is {len(chosen)}, not {data['size']}")
    if data.get("t") is not None and count < data["t"]:
        problems.append(f"dominates {count} < t = {data['t']} vertices")
    if data.get("k") is not None and len(chosen) > data["k"]:
        problems.append(f"chooses {len(chosen)} > k = {data['k']} vertices")
    return _witness_report(problems, {"chosen": chosen})


def _check_canonical(g: Graph, data: dict) -> VerificationReport:
    witness = data["witness"]
    if sorted(witness) != list(range(g.n)):
        return _witness_report(["witness is not a permutation of the vertices"], {})
    if serialize(g.relabel(witness)).hex() != data["certificate"]:
        return _witness_report(["relabelled graph does not serialize to the certificate"], {})
    return VerificationReport()


def cmd_check(args) -> int:
    g = read_graph(args.graph, args.format)
    limits = _limits(args)
    pattern = read_graph(args.pattern, args.format) if args.pattern else None
    if args.artifact is None:
        if pattern is None:
            raise CliError("usage", "check needs an artifact or --pattern")
        model = (find_minor if args.relation == "minor" else find_topological_subgraph)(pattern, g, limits)
        _emit(args, _dumps(model.to_json() if model else {"type": "absent", "relation": args.relation}))
        return 0
    data = _read_json(args.artifact)
    try:
        if isinstance(data, dict) and "arcs" in data:
            d = TreelikeDecomposition.from_json(data)
            report = verify_treelike(g, d)
            if report.ok:
                report = verify_invariance(g, d, limits)
        elif isinstance(data, dict) and "nodes" in data:
            report = verify_decomposition(g, _tree_from_json(data), _constraint(args, g.n), limits)
        elif isinstance(data, dict) and data.get("type") in ("minor_model", "topological_model", "absent"):
            if pattern is None:
                raise CliError("usage", "checking a model needs --pattern")
            report = _check_model(g, pattern, data, limits)
        elif isinstance(data, dict) and "chosen" in data:
            report = _check_pds(g, data)
        elif isinstance(data, dict) and "certificate" in data:
            report = _check_canonical(g, data)
        else:
            raise CliError("input", f"{args.artifact}: unrecognised artifact")
    except (KeyError, TypeError, IndexError) as exc:
        raise CliError("input", f"{args.artifact}: malformed artifact ({exc!r})") from None
    _emit(args, _dumps(report.to_json()))
    if not report.ok:
        raise CliError("verification", ", ".join(report.kinds()))
    return 0


# --- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=sorted(FORMATS), help="graph format (default: from extension)")
    common.add_argument("--ceiling", help="search ceilings, e.g. 'host=14,pattern=6' (default: $TORSOLAB_CEILING)")
    common.add_argument("-o", "--output", help="write output here instead of stdout")

    constraint = _Parser(add_help=False)
    constraint.add_argument("--minor", metavar="FILE", help="excluded minor, as a graph file")
    constraint.add_argument("--apex", type=int, default=0, help="apex budget (default 0)")
    constraint.add_argument("--degree", type=int, help="degree bound after removing apices")
    constraint.add_argument("--max-bag-size", type=int)
    constraint.add_argument("--max-adhesion", type=int)

    parser = _Parser(prog="torsolab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", parents=[common, constraint], help="tree decomposition as JSON")
    p.add_argument("graph")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("treelike", parents=[common, constraint], help="invariant treelike decomposition as JSON")
    p.add_argument("graph")
    p.set_defaults(func=cmd_treelike)

    p = sub.add_parser("canon", parents=[common, constraint], help="canonical certificate as hex")
    p.add_argument("graph")
    p.add_argument("--json", action="store_true", help="emit certificate and witness as JSON")
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("iso", parents=[common, constraint], help="isomorphism test (exit 0 yes, 1 no)")
    p.add_argument("graph")
    p.add_argument("other")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("pds", parents=[common], help="partial dominating set as JSON")
    p.add_argument("graph")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--t", type=int, help="minimum number of vertices to dominate")
    target.add_argument("--k", type=int, help="maximise domination with at most k vertices")
    p.add_argument("--decomposition", metavar="FILE", help="tree decomposition JSON to run on")
    p.set_defaults(func=cmd_pds)

    p = sub.add_parser("check", parents=[common, constraint], help="verify an artifact against a graph")
    p.add_argument("graph")
    p.add_argument("artifact", nargs="?", help="decomposition, model, PDS solution or canonical form JSON")
    p.add_argument("--pattern", metavar="FILE", help="pattern graph for minor/topological models")
    p.add_argument("--relation", choices=("minor", "topological"), default="minor")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as exc:
        kind, detail = exc.kind, exc.detail
    except GraphFormatError as exc:
        kind, detail = "format", str(exc)
    except SizeLimitError as exc:
        kind, detail = "size-limit", str(exc)
    except DecompositionNotFound as exc:
        kind, detail = "not-found", str(exc)
    except InvalidDecompositionError as exc:
        kind, detail = "invalid-decomposition", ", ".join(exc.report.kinds())
    except (GraphInputError, ValueError) as exc:
        kind, detail = "input", str(exc)
    print(f"error: {kind}: {' '.join(detail.split())}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
