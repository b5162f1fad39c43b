"""Command-line runner: exit codes, report schemas, golden regression."""

import json
import os

import pytest

from ncqsys.cli import DEFAULT_GOLDEN, golden_current, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_verify_hirota_report(tmp_path, capsys):
    report = tmp_path / "hirota.json"
    code, _ = run(
        ["verify-hirota", "--r", "1", "--window", "1", "--seed", "7",
         "--report", str(report)],
        capsys,
    )
    assert code == 0
    data = json.loads(report.read_text())
    assert data["identity"] == "hirota"
    assert data["status"] == "pass"
    assert data["max_discrepancy"] == "0"


def test_verify_pluecker_and_truncation(capsys):
    code, out = run(["verify-pluecker", "--count", "5", "--seed", "3"], capsys)
    assert code == 0
    assert json.loads(out)["status"] == "pass"
    code, out = run(
        ["verify-truncation", "--r", "2", "--window", "6", "--seed", "5"], capsys
    )
    assert code == 0
    assert json.loads(out)["status"] == "pass"


def test_graph_emit_dot_and_json(capsys):
    code, out = run(
        ["graph", "emit", "--motzkin", "0,1", "--flavor", "gamma",
         "--format", "dot", "--backend", "symbolic"],
        capsys,
    )
    assert code == 0
    assert out.startswith("digraph Gamma")
    code, out = run(
        ["graph", "emit", "--motzkin", "0,1", "--flavor", "g",
         "--backend", "symbolic"],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"vertices", "edges", "root", "flavor"}
    assert all(set(e) == {"u", "v", "tpow", "weight"} for e in data["edges"])


def test_cfrac_expand_canonical(capsys):
    code, out = run(
        ["cfrac", "expand", "--motzkin", "0,0", "--order", "2",
         "--backend", "symbolic"],
        capsys,
    )
    assert code == 0
    assert out.splitlines()[0] == "t^0: 1"
    code, out = run(
        ["cfrac", "canonical", "--motzkin", "0,1", "--backend", "symbolic",
         "--order", "4"],
        capsys,
    )
    assert code == 0
    assert out.startswith("(inv1m")


def test_paths_count_and_expand(capsys):
    code, out = run(["paths", "count", "--motzkin", "0,0", "--order", "3"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "order,walks"
    code, out = run(
        ["paths", "expand", "--motzkin", "0,0", "--order", "3",
         "--backend", "free"],
        capsys,
    )
    assert code == 0
    assert out.splitlines()[1] == '0,"1"'


def test_paths_verify_lgv(capsys):
    code, out = run(
        ["paths", "verify-lgv", "--motzkin", "0,1", "--order", "2",
         "--seed", "3"],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    assert all(a["status"] == "pass" for a in data["assertions"])


def test_systems_report_schema(capsys):
    code, out = run(["systems", "a1nc", "--seed", "3", "--window", "4"], capsys)
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"system", "params", "assertions", "artifacts"}
    assert data["system"] == "a1nc"
    assert all(
        set(a) == {"name", "status", "detail"} for a in data["assertions"]
    )


def test_systems_rank2walk_wrong_bc_is_config_error(capsys):
    code, _ = run(["systems", "rank2walk", "--b", "2", "--c", "5"], capsys)
    assert code == 2


def test_bad_motzkin_is_config_error(capsys):
    code, _ = run(["paths", "count", "--motzkin", "nope"], capsys)
    assert code == 2


def test_golden_regression_passes(capsys):
    code, out = run(["golden"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["system"] == "golden"
    assert all(a["status"] == "pass" for a in data["assertions"])


def test_golden_a1_series_content():
    text = open(os.path.join(DEFAULT_GOLDEN, "a1_series.txt")).read()
    assert text.strip() == "1,1,2,5,13,34,89,233,610"


def test_golden_empty_suite_passes(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("NCQSYS_GOLDEN_DIR", str(tmp_path))
    code, out = run(["golden"], capsys)
    assert code == 0
    assert json.loads(out)["assertions"] == []


def test_golden_detects_corruption(tmp_path, capsys, monkeypatch):
    for name, text in golden_current().items():
        (tmp_path / name).write_text(text)
    (tmp_path / "a1_series.txt").write_text("1,1,2,5,13,34,90\n")
    monkeypatch.setenv("NCQSYS_GOLDEN_DIR", str(tmp_path))
    code, out = run(["golden"], capsys)
    assert code == 1
    data = json.loads(out)
    assert any(a["status"] == "fail" for a in data["assertions"])


def test_golden_reports_are_deterministic(capsys):
    first = golden_current()
    second = golden_current()
    assert first == second
