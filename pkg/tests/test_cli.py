import json
import os

import pytest

from cli_cases import CASES, GOLDEN, TESTS, render_all, run_cli
from torsolab.cli import main
from torsolab.formats import parse_graph
from torsolab.generators import petersen_graph

UPDATE = os.environ.get("UPDATE_GOLDEN") == "1"


@pytest.fixture(scope="module")
def rendered():
    out = render_all()
    if UPDATE:
        GOLDEN.mkdir(exist_ok=True)
        for name, text in out.items():
            (GOLDEN / f"{name}.txt").write_text(text)
    return out


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(rendered, name):
    assert rendered[name] == (GOLDEN / f"{name}.txt").read_text()


def test_two_encodings_give_same_hex():
    a = run_cli(["canon", "data/p4.edges"])
    b = run_cli(["canon", "data/p4_shuffled.edges"])
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout and len(a.stdout.strip()) > 0


def test_iso_exit_codes():
    assert run_cli(["iso", "data/p4.edges", "data/claw.edges"]).returncode == 1
    assert run_cli(["iso", "data/p4.edges", "data/p4_shuffled.edges"]).returncode == 0


def test_deleted_bag_vertex_names_the_axiom():
    proc = run_cli(["check", "data/k4pair.edges", "data/k4pair_td_broken.json"])
    assert proc.returncode == 2
    assert proc.stderr.startswith("error: verification:")
    assert "coverage" in proc.stderr


@pytest.mark.parametrize("args,kind", [
    (["canon", "data/selfloop.edges"], "format"),
    (["canon", "data/nope.edges"], "input"),
    (["decompose", "data/k4pair.edges", "--degree", "-1"], "input"),
    (["decompose", "data/k5.edges", "--degree", "2", "--max-bag-size", "3"], "not-found"),
    (["pds", "data/c6.edges", "--t", "9"], "input"),
    (["bogus"], "usage"),
])
def test_error_lines(args, kind):
    proc = run_cli(args)
    assert proc.returncode == 2
    lines = proc.stderr.splitlines()
    assert len(lines) == 1 and lines[0].startswith(f"error: {kind}:")
    assert proc.stdout == ""


def test_graph6_from_stdin():
    proc = run_cli(["canon", "--format", "graph6", "-"], stdin=(TESTS / "data/petersen.g6").read_text())
    assert proc.returncode == 0
    assert proc.stdout == run_cli(["canon", "data/kneser52.edges"]).stdout
    assert parse_graph((TESTS / "data/petersen.g6").read_text(), "graph6") == petersen_graph()


ARTIFACTS = [
    (["decompose", "--degree", "3"], "data/k4edge.edges", ["--degree", "3"]),
    (["treelike", "--degree", "2", "--max-bag-size", "3"], "data/c4.edges", []),
    (["pds", "--t", "6"], "data/c6.edges", []),
    (["canon", "--json", "--degree", "3"], "data/k4pair.edges", ["--degree", "3"]),
    (["check", "--pattern", "data/k5.edges", "--relation", "minor"], "data/petersen.g6",
     ["--pattern", "data/k5.edges", "--relation", "minor"]),
    (["check", "--pattern", "data/k5.edges", "--relation", "topological"], "data/petersen.g6",
     ["--pattern", "data/k5.edges", "--relation", "topological"]),
]


@pytest.mark.parametrize("make,graph,flags", ARTIFACTS)
def test_emitted_json_rechecks(tmp_path, make, graph, flags):
    out = tmp_path / "artifact.json"
    proc = run_cli([*make, graph, "-o", str(out)])
    assert proc.returncode == 0, proc.stderr
    json.loads(out.read_text())
    check = run_cli(["check", graph, str(out), *flags])
    assert check.returncode == 0, check.stderr
    assert json.loads(check.stdout)["ok"] is True


def test_in_process_main_and_output_file(tmp_path, capsys):
    out = tmp_path / "td.json"
    code = main(["decompose", str(TESTS / "data/k4pair.edges"), "--degree", "3", "-o", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["graph_ref"] == "k4pair.edges"
    assert capsys.readouterr().out == ""
