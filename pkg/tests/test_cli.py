import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from radcomplex import cli
from radcomplex.classes import FiniteClass, LinearNormBall, Sample
from radcomplex.classfile import save_class_file
from radcomplex.suites import Row


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_counterexample_report(capsys):
    code, out, _ = run_cli(capsys, "counterexample", "--n", "100")
    assert code == 0
    assert "lhs=50 rhs=10 ratio=5" in out
    assert "REFUTED" in out


def test_counterexample_refuting_constant(capsys):
    code, out, _ = run_cli(capsys, "counterexample", "--n", "10", "--K", "1")
    assert code == 0 and "smallest refuting n is 5" in out


def test_verify_preset(capsys, tmp_path):
    path = tmp_path / "v.csv"
    code, out, _ = run_cli(capsys, "verify", "--preset", "finite-random", "--trials", "200", "--seed", "7",
                           "--csv", str(path))
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 200
    assert {r["verdict"] for r in rows} == {"HOLDS"}
    assert "HOLDS=200" in out


def test_csv_header_and_stdout(capsys):
    code, out, _ = run_cli(capsys, "counterexample", "--n", "4", "--csv", "-")
    assert code == 0
    text = out[out.index("instance_id"):]
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == cli.CSV_HEADER
    assert all(len(r) == 8 for r in rows)


def test_exit_two_on_violation(capsys, monkeypatch):
    bad = Row("x", "demo", 2.0, 0.0, "exact_enum", 1.0, "VIOLATED", -1.0)
    monkeypatch.setitem(cli.COMMANDS, "counterexample", lambda opts: ([bad], ["demo"]))
    code, out, _ = run_cli(capsys, "counterexample", "--n", "4")
    assert code == 2 and "violated=1" in out


@pytest.mark.parametrize("argv", [
    ["counterexample"],
    ["suite"],
    ["suite", "nope"],
    ["bounds"],
    ["bounds", "--kind", "theorem1", "--mean", "0.1", "--complexity", "1", "--n", "5", "--delta", "1.5"],
    ["estimate", "--class", "/nonexistent/file.txt"],
    ["verify", "--preset", "nope"],
    ["estimate", "--dist", "cauchy"],
], ids=" ".join)
def test_usage_errors_exit_one(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 1
    assert err.startswith("radcomplex: error: ")


def test_argparse_errors_exit_one():
    for argv in (["counterexample", "--bogus"], ["counterexample", "--n", "0"], []):
        with pytest.raises(SystemExit) as info:
            cli.main(argv)
        assert info.value.code == 1


def test_malformed_config(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{\n  "n": 4,\n  "seed": 1,,\n}\n')
    code, _, err = run_cli(capsys, "counterexample", "--config", str(cfg))
    assert code == 1
    assert f"{cfg}:3:13:" in err


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{\n  "n": 4,\n    "colour": "red"\n}\n')
    code, _, err = run_cli(capsys, "counterexample", "--config", str(cfg))
    assert code == 1
    assert f"{cfg}:3:5: unknown key 'colour' for command counterexample" in err


def test_config_values_and_precedence(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "counterexample", "n": 16}))
    code, out, _ = run_cli(capsys, "counterexample", "--config", str(cfg))
    assert code == 0 and "n=16:" in out
    code, out, _ = run_cli(capsys, "counterexample", "--config", str(cfg), "--n", "64")
    assert code == 0 and "n=64:" in out
    cfg.write_text(json.dumps({"command": "suite"}))
    code, _, err = run_cli(capsys, "counterexample", "--config", str(cfg))
    assert code == 1 and "not 'counterexample'" in err


def test_default_seed_reported(capsys):
    _, out, _ = run_cli(capsys, "counterexample", "--n", "1")
    assert "seed=0x5eed" in out


def test_bounds_commands(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "bounds", "--kind", "kmeans", "--K", "2", "--n", "100")
    assert code == 0 and "84.8528" in out
    code, out, _ = run_cli(capsys, "bounds", "--kind", "ltl", "--n", "4", "--meta", "10")
    assert code == 0 and "7.07107" in out
    code, out, _ = run_cli(capsys, "bounds", "--kind", "operator", "--traces", "1,1,1,1")
    assert code == 0 and "2.82843" in out
    path = tmp_path / "ortho.txt"
    save_class_file(LinearNormBall(Sample(np.eye(4)), 1, 1.0), path)
    code, out, _ = run_cli(capsys, "bounds", "--kind", "frobenius", "--class", str(path))
    assert code == 0 and "frobenius bound = 2 " in out and "HOLDS" in out


def test_estimate_and_verify_class_file(capsys, tmp_path):
    path = tmp_path / "pm.txt"
    save_class_file(FiniteClass(np.array([[[1.0]], [[-1.0]]])), path)
    code, out, _ = run_cli(capsys, "estimate", "--class", str(path))
    assert code == 0 and "= 1 +- 0 (exact, exact)" in out
    code, out, _ = run_cli(capsys, "estimate", "--class", str(path), "--losses", "norm", "--method", "mc")
    assert code == 0 and "(mc, exact)" in out
    code, out, _ = run_cli(capsys, "verify", "--class", str(path), "--losses", "norm")
    assert code == 0 and "HOLDS" in out


def test_class_file_error_exit_one(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("kind finite\nn 1\nK 2\n\n1 z\n")
    code, _, err = run_cli(capsys, "estimate", "--class", str(path))
    assert code == 1 and f"{path}:5:3: non-numeric token 'z'" in err


def test_suite_csv_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert cli.main(["suite", "counterexample", "khintchine", "--seed", "7", "--csv", str(p)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "radcomplex", "counterexample", "--n", "4"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "lhs=2 rhs=2 ratio=1" in proc.stdout
