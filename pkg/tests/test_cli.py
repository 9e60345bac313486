"""End-to-end CLI behavior: subcommands, formats, exit codes, determinism."""

import json
import subprocess
import sys
from pathlib import Path

from patcheq.cli import main

REPO = Path(__file__).resolve().parent.parent
SOLVER = f"{sys.executable} -m patcheq.smtbv"


def run_cli(argv, capsys):
    code = main(argv + ["--solver-cmd", SOLVER])
    out, err = capsys.readouterr()
    return code, out, err


def test_summarize_prints_paths_and_smtlib(capsys, corpus_dir):
    code, out, _ = run_cli(
        ["summarize", str(corpus_dir / "cve_2013_0859_doubles_metadata/original.fn")],
        capsys,
    )
    assert code == 0
    assert "2 path(s)" in out
    assert "(set-logic QF_BV)" in out
    assert "(declare-const count (_ BitVec 32))" in out


def test_check_reports_verdict_and_witness(capsys, corpus_dir):
    code, out, _ = run_cli(
        [
            "check",
            str(corpus_dir / "eqbench_ltfive/original.fn"),
            str(corpus_dir / "eqbench_ltfive/patched.fn"),
            "--format", "json",
        ],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "partially_equivalent"
    assert "x" in data["witness"]


def test_impact_json_fields(capsys, corpus_dir):
    code, out, _ = run_cli(
        [
            "impact",
            str(corpus_dir / "cve_2012_2384_cliprects/original.fn"),
            str(corpus_dir / "cve_2012_2384_cliprects/patched.fn"),
            "--algorithm", "combined", "--format", "json", "--stable",
        ],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "partially_equivalent"
    assert data["algorithm"] == "combined"
    assert data["eq_lower_bound"] == str(2**29)
    assert data["eq_percent_lower_bound"] == {
        "decimal": "12.50", "numerator": "25", "denominator": "2",
    }
    assert data["impact_percent_upper_bound"]["decimal"] == "87.50"
    assert data["impact_percent_upper_bound"]["numerator"] == "175"
    assert "pretty" in data["condition"] and "smtlib" in data["condition"]
    assert "elapsed_ms" not in data  # stable mode drops timing
    assert data["incomplete"] is False


def test_stable_reports_are_byte_identical(capsys, corpus_dir):
    argv = [
        "impact",
        str(corpus_dir / "cve_2013_0859_doubles_metadata/original.fn"),
        str(corpus_dir / "cve_2013_0859_doubles_metadata/patched.fn"),
        "--algorithm", "enumerate", "--format", "json", "--stable",
    ]
    code1, out1, _ = run_cli(list(argv), capsys)
    code2, out2, _ = run_cli(list(argv), capsys)
    assert code1 == code2 == 0
    assert out1 == out2


def test_corpus_runs_bundled_cases(capsys, corpus_dir):
    code, out, _ = run_cli(
        ["corpus", str(corpus_dir), "--jobs", "4"], capsys
    )
    assert code == 0
    assert "0 failed" in out
    assert "cve_2012_2384_cliprects" in out
    assert "87.50" in out


def test_corpus_expectation_failure_exits_one(tmp_path, capsys, corpus_dir):
    src = corpus_dir / "cve_2013_0859_doubles_metadata"
    for name in ("original.fn", "patched.fn"):
        (tmp_path / name).write_text((src / name).read_text())
    (tmp_path / "pair.case").write_text(
        "original = original.fn\npatched = patched.fn\nmethod = enumerate\n"
        "expect_verdict = T_EQ\n"
    )
    code, out, _ = run_cli(["corpus", str(tmp_path)], capsys)
    assert code == 1
    assert "expected T_EQ" in out


def test_corpus_continues_past_broken_case(tmp_path, capsys):
    (tmp_path / "bad.fn").write_text("fn f(x: i32 -> i32 { return x; }")
    (tmp_path / "ok_orig.fn").write_text("fn f(x: i8) -> i8 { return x; }")
    (tmp_path / "ok_patched.fn").write_text("fn f(x: i8) -> i8 { return x; }")
    (tmp_path / "broken.case").write_text(
        "original = bad.fn\npatched = bad.fn\n"
    )
    (tmp_path / "works.case").write_text(
        "original = ok_orig.fn\npatched = ok_patched.fn\nexpect_verdict = T_EQ\n"
    )
    code, out, _ = run_cli(["corpus", str(tmp_path)], capsys)
    assert code == 1  # the broken case failed, the good one still ran
    assert "error" in out
    assert "equivalent" in out


def test_empty_corpus_directory_succeeds(tmp_path, capsys):
    code, out, _ = run_cli(["corpus", str(tmp_path)], capsys)
    assert code == 0
    assert "0 case(s), 0 failed" in out


def test_missing_solver_is_infrastructure_error(capsys, corpus_dir):
    code = main([
        "check",
        str(corpus_dir / "eqbench_dart/original.fn"),
        str(corpus_dir / "eqbench_dart/patched.fn"),
        "--solver-cmd", "/nonexistent/solver-binary",
    ])
    assert code == 2


def test_env_vars_mirror_flags(corpus_dir, monkeypatch, capsys):
    monkeypatch.setenv("PATCHEQ_ALGORITHM", "enumerate")
    monkeypatch.setenv("PATCHEQ_FORMAT", "json")
    monkeypatch.setenv("PATCHEQ_SOLVER_CMD", SOLVER)
    code = main([
        "impact",
        str(corpus_dir / "cve_2013_0859_doubles_metadata/original.fn"),
        str(corpus_dir / "cve_2013_0859_doubles_metadata/patched.fn"),
    ])
    out, _ = capsys.readouterr()
    assert code == 0
    data = json.loads(out)
    assert data["algorithm"] == "enumerate"
    assert data["case"] == "case2"


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "patcheq.cli", "--help"],
        capture_output=True, text=True,
        env={"PYTHONPATH": str(REPO / "src"), "PATH": "/usr/bin:/bin"},
    )
    assert proc.returncode == 0
    assert "summarize" in proc.stdout and "corpus" in proc.stdout
