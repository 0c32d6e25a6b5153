import json
from pathlib import Path

import pytest

from spreadlab.cli import main
from spreadlab.suites import SUITE_NAMES, emit_report, parse_report, run_suite


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nonexistent")


def test_suite_report_is_deterministic():
    a = run_suite("esa", seed=42, trials=3)
    b = run_suite("esa", seed=42, trials=3)
    assert emit_report(a, "csv") == emit_report(b, "csv")
    assert a.cases == b.cases


def test_suite_failures_become_rows_not_crashes():
    rep = run_suite("cbh", seed=1, trials=2)
    assert rep.cases  # counterexample row is present and passes
    assert any("expected-violation" in c.case_id for c in rep.cases)


def test_small_runs_of_each_suite():
    for name in SUITE_NAMES:
        rep = run_suite(name, seed=7, trials=2)
        assert rep.passed, (name, [c for c in rep.cases if not c.passed][:3])
        assert rep.suite == name and rep.cases


def test_csv_shape():
    rep = run_suite("idempotence", seed=3, trials=2)
    text = emit_report(rep, "csv")
    lines = text.strip().split("\n")
    assert lines[0] == "suite,case_id,space,input,lhs,rhs,constant,tol,pass"
    assert len(lines) == len(rep.cases) + 1


def test_structured_roundtrip():
    rep = run_suite("esa", seed=5, trials=2)
    text = emit_report(rep, "structured")
    assert parse_report(text) == rep


def test_emit_rejects_unknown_format():
    rep = run_suite("esa", seed=5, trials=1)
    with pytest.raises(ValueError):
        emit_report(rep, "xml")


# -- CLI ---------------------------------------------------------------------


def write_vec(tmp_path: Path, name: str, coords) -> Path:
    path = tmp_path / name
    path.write_text(json.dumps({"coords": coords}))
    return path


def test_cli_norm(tmp_path, capsys):
    vec = write_vec(tmp_path, "v.json", [[1, 1], [2, -1]])
    assert main(["norm", "--space", "cjames(lp(2))", "--vec", str(vec)]) == 0
    out = capsys.readouterr().out.strip()
    assert abs(float(out) - 2**0.5) < 1e-12


def test_cli_norm_exact(tmp_path, capsys):
    vec = write_vec(tmp_path, "v.json", [[1, "1/2"], [3, "-3/2"]])
    assert main(["norm", "--space", "cjames(lp(1))", "--vec", str(vec), "--exact"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("2 ")
    # no exact path for the quadratic base
    code = main(["norm", "--space", "cjames(lp(2))", "--vec", str(vec), "--exact"])
    assert code == 2


def test_cli_norm_saturated_prints_bracket(tmp_path, capsys):
    vec = write_vec(tmp_path, "v.json", [[3, 1]])
    expr = "saturate(max(schreier_u(lp(2)), schreier_c(cjames(lp(2)))))"
    assert main(["norm", "--space", expr, "--vec", str(vec)]) == 0
    assert "bracket" in capsys.readouterr().out


def test_cli_usage_errors(tmp_path, capsys):
    vec = write_vec(tmp_path, "v.json", [[1, 1]])
    assert main(["norm", "--space", "lp(0.5)", "--vec", str(vec)]) == 2
    assert main(["norm", "--space", "cjames(summing)", "--vec", str(vec)]) == 2
    assert main(["norm", "--space", "lp(2)", "--vec", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["norm", "--space", "lp(2)", "--vec", str(bad)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nonexistent"])
    assert exc.value.code == 2


def test_cli_verify_writes_report(tmp_path, capsys):
    out = tmp_path / "report.csv"
    code = main(["verify", "--suite", "idempotence", "--seed", "11",
                 "--trials", "2", "--out", str(out), "--format", "csv"])
    assert code == 0
    text = out.read_text()
    assert text.startswith("suite,case_id,")
    assert "cases passed" in capsys.readouterr().out


def test_cli_verify_seed_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SPREADLAB_SEED", "999")
    code = main(["verify", "--suite", "idempotence", "--trials", "1"])
    assert code == 0
    assert "seed=999" in capsys.readouterr().out


def test_cli_decompose(tmp_path, capsys):
    vec = write_vec(tmp_path, "v.json", [[1, 1], [2, -1], [3, 2]])
    code = main(["decompose", "--space", "cjames(lp(2))", "--vec", str(vec),
                 "--max-blocks", "8"])
    assert code == 0
    out = capsys.readouterr().out
    assert "u-part norm" in out and "lower bound" in out


def test_cli_spreading(capsys):
    code = main(["spreading", "--space", "schreier_c(cjames(lp(2)))",
                 "--coeffs", "1,-1", "--shifts", "2,3,5"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.count("shift") == 3


def test_cli_dual(tmp_path, capsys):
    f = write_vec(tmp_path, "f.json", [[2, 1]])
    code = main(["dual", "--space", "cjames(lp(2))", "--functional", str(f),
                 "--restarts", "5"])
    assert code == 0
    assert "lower bound" in capsys.readouterr().out


def test_cli_report_roundtrip(tmp_path, capsys):
    structured = tmp_path / "rep.json"
    code = main(["verify", "--suite", "esa", "--seed", "2", "--trials", "2",
                 "--out", str(structured), "--format", "structured"])
    assert code == 0
    csv_out = tmp_path / "rep.csv"
    assert main(["report", "--in", str(structured), "--out", str(csv_out),
                 "--format", "csv"]) == 0
    assert csv_out.read_text().startswith("suite,case_id,")
    # structured -> structured round trip preserves the report
    again = tmp_path / "rep2.json"
    assert main(["report", "--in", str(structured), "--out", str(again),
                 "--format", "structured"]) == 0
    assert parse_report(again.read_text()) == parse_report(structured.read_text())
    assert main(["report", "--in", str(csv_out), "--out", str(again),
                 "--format", "csv"]) == 2  # CSV is not a structured report
