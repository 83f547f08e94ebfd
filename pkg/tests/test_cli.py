import csv
import io
import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from sendov_cert.cli import EXIT_INCONCLUSIVE, EXIT_OK, EXIT_REFUTED, EXIT_USAGE, main

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- verify-all --------------------------------------------------------------------------


def test_verify_all_writes_files(capsys, tmp_path):
    code, out, _ = run(capsys, "verify-all", "--out", str(tmp_path), "--jobs", "2")
    assert code == EXIT_OK
    assert "verdict: Certified" in out
    assert json.loads((tmp_path / "report.json").read_text())["verdict"] == "Certified"
    assert len(list(tmp_path.glob("*.json"))) == 16
    for p in sorted(tmp_path.glob("2.*.json")):
        assert run(capsys, "replay", str(p))[0] == EXIT_OK, p


def test_verify_all_depth_cap(capsys, tmp_path):
    assert run(capsys, "verify-all", "--out", str(tmp_path), "--max-depth", "1", "--quiet")[0] == EXIT_INCONCLUSIVE


def test_verify_all_mutation_refutes(capsys, tmp_path):
    code, out, _ = run(capsys, "verify-all", "--out", str(tmp_path), "--mutate", "R=0.5", "--format", "md", "--quiet")
    assert code == EXIT_REFUTED
    assert (tmp_path / "report.md").read_text().startswith("# Verdict: Refuted")


@pytest.mark.parametrize(
    "argv",
    [
        ["verify-all", "--mutate", "bogus=1"],
        ["verify-all", "--mutate", "R"],
        ["verify-all", "--format", "xml"],
        ["verify-all", "--jobs", "0"],
        ["frobnicate"],
    ],
)
def test_verify_all_usage_errors(capsys, tmp_path, argv):
    try:
        code = main(argv + ["--out", str(tmp_path)] if argv[0] == "verify-all" else argv)
    except SystemExit as exc:
        code = exc.code
    assert code == EXIT_USAGE


def test_unwritable_output_is_usage_error(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run(capsys, "certify", "3.1", "--out", str(blocker / "sub"))[0] == EXIT_USAGE


# -- certify and replay -----------------------------------------------------------------


def test_certify_f22(capsys, tmp_path):
    code, out, _ = run(capsys, "certify", "2.2", "--out", str(tmp_path))
    assert code == EXIT_OK
    summary = json.loads(out)
    assert summary["status"] == "Certified"
    assert Path(summary["path"]) == tmp_path / "2.2.json"


def test_certify_exit_codes(capsys, tmp_path):
    assert run(capsys, "certify", "2.2", "--param", "R=0.5", "--out", str(tmp_path))[0] == EXIT_REFUTED
    assert run(capsys, "certify", "2.9", "--max-depth", "1", "--out", str(tmp_path))[0] == EXIT_INCONCLUSIVE
    assert run(capsys, "certify", "9.9", "--out", str(tmp_path))[0] == EXIT_USAGE
    assert run(capsys, "certify", "2.2", "--box", "zz=0:1", "--out", str(tmp_path))[0] == EXIT_USAGE
    assert run(capsys, "certify", "2.2", "--box", "a=0.9", "--out", str(tmp_path))[0] == EXIT_USAGE


def test_certify_sub_box(capsys, tmp_path):
    code, out, _ = run(capsys, "certify", "2.2", "--box", "a=0.845:0.9", "--param", "offset=0.004", "--out", str(tmp_path))
    assert code == EXIT_OK
    dims = dict(json.loads(out)["domain"]["dims"])
    assert dims["a"][0] <= 0.845 and dims["a"][1] >= 0.9


def test_certify_infeasible_box_is_success(capsys, tmp_path):
    code, out, _ = run(capsys, "certify", "2.3-iv", "--box", "a=0.845:0.85", "--box", "q=0.5:0.7", "--out", str(tmp_path))
    assert code == EXIT_OK
    assert json.loads(out)["status"] == "InfeasibleRegion"


def test_small_R_perturbation_is_absorbed(capsys, tmp_path):
    # R = 0.47 leaves F22 positive on the whole range, so it is not a refuting mutation
    assert run(capsys, "certify", "2.2", "--param", "R=0.47", "--out", str(tmp_path))[0] == EXIT_OK


def test_certificate_files_are_byte_stable(capsys, tmp_path):
    run(capsys, "certify", "2.13-iv", "--out", str(tmp_path / "one"))
    run(capsys, "certify", "2.13-iv", "--out", str(tmp_path / "two"))
    assert (tmp_path / "one" / "2.13-iv.json").read_bytes() == (tmp_path / "two" / "2.13-iv.json").read_bytes()


def test_env_var_sets_default_out(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SENDOV_CERT_DIR", str(tmp_path / "env"))
    assert run(capsys, "certify", "2.1")[0] == EXIT_OK
    assert (tmp_path / "env" / "2.1.json").exists()


@pytest.fixture()
def f22_file(capsys, tmp_path):
    run(capsys, "certify", "2.2", "--out", str(tmp_path))
    return tmp_path / "2.2.json"


def test_replay_ok(capsys, f22_file):
    code, out, _ = run(capsys, "replay", str(f22_file))
    assert code == EXIT_OK
    assert json.loads(out)["ok"] is True


def test_replay_tampered_leaf(capsys, f22_file):
    d = json.loads(f22_file.read_text())
    node = d["children"]["tree"]
    while "children" in node:
        node = node["children"][-1]
    node["enc"] = [node["enc"][0] * 1.5, node["enc"][1]]
    f22_file.write_text(json.dumps(d))
    code, out, _ = run(capsys, "replay", str(f22_file))
    assert code == EXIT_REFUTED
    assert json.loads(out)["errors"]


def test_replay_bad_inputs(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "replay", str(bad))[0] == EXIT_REFUTED
    assert run(capsys, "replay", str(tmp_path / "missing.json"))[0] == EXIT_USAGE


# -- poly and sample ----------------------------------------------------------------------


def test_poly_fixture(capsys):
    code, out, _ = run(capsys, "poly", str(FIXTURES / "z9.json"))
    assert code == EXIT_OK
    d = json.loads(out)
    assert abs(d["derived"]["I_a"] - 0.92587) < 1e-5
    assert max(d["identity_residuals"].values()) <= 1e-8
    assert "lemma_2_6_threshold" in d["diagnostics"]


def test_poly_output_is_byte_stable(capsys):
    one = run(capsys, "poly", str(FIXTURES / "z2.json"))[1]
    two = run(capsys, "poly", str(FIXTURES / "z2.json"))[1]
    assert one == two


def test_poly_bad_files(capsys, tmp_path):
    bad = tmp_path / "p.json"
    bad.write_text(json.dumps({"a": 0.5, "zeros": [[3.0, 0.0]]}))
    assert run(capsys, "poly", str(bad))[0] == EXIT_USAGE
    bad.write_text("[]")
    assert run(capsys, "poly", str(bad))[0] == EXIT_USAGE
    assert run(capsys, "poly", str(tmp_path / "none.json"))[0] == EXIT_USAGE


def test_sample_lemma23(capsys):
    code, out, _ = run(capsys, "sample", "lemma23", "--trials", "10000", "--seed", "1")
    assert code == EXIT_OK
    assert json.loads(out)["violations"] == []


def test_sample_is_byte_stable(capsys):
    one = run(capsys, "sample", "lemma26", "--trials", "2000", "--seed", "4")[1]
    two = run(capsys, "sample", "lemma26", "--trials", "2000", "--seed", "4")[1]
    assert one == two


def test_sample_spotchecks_and_unknown(capsys):
    assert run(capsys, "sample", "spotchecks")[0] == EXIT_OK
    assert run(capsys, "sample", "nosuch")[0] == EXIT_USAGE


# -- curves -----------------------------------------------------------------------------


def test_curves_case_i(capsys):
    code, out, _ = run(capsys, "curves", "--a", "0.845:1:0.001", "--case", "i")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["a", "q", "case", "U_A", "U_B", "U", "lhs213", "Ustar", "margin"]
    assert len(rows) == 156
    assert all(float(r["margin"]) > 0 for r in rows)
    assert out == run(capsys, "curves", "--a", "0.845:1:0.001", "--case", "i")[1]


def test_curves_with_q_grid(capsys, tmp_path):
    path = tmp_path / "iv.csv"
    assert run(capsys, "curves", "--a", "0.9:0.95:0.01", "--q", "0.7:1:0.05", "--case", "iv", "--out", str(path))[0] == EXIT_OK
    rows = list(csv.DictReader(path.open()))
    assert rows and all(float(r["margin"]) > 0 for r in rows)


def test_curves_default_q_values(capsys):
    out = run(capsys, "curves", "--a", "0.9", "--case", "iii_a")[1]
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 11 and all(float(r["margin"]) > 0 for r in rows)


@pytest.mark.parametrize("argv", [["--a", "0.9", "--case", "v"], ["--a", "0.5:1:0.1", "--case", "i"], ["--a", "1:0.9:0.1", "--case", "i"], ["--a", "x", "--case", "i"]])
def test_curves_usage_errors(capsys, argv):
    assert run(capsys, "curves", *argv)[0] == EXIT_USAGE


# -- installed entry points -----------------------------------------------------------------


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "sendov_cert", "certify", "3.1", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == EXIT_OK, proc.stderr
    assert json.loads(proc.stdout)["status"] == "Certified"


@pytest.mark.skipif(shutil.which("sendov-cert") is None, reason="console script not installed")
def test_console_script_usage_error():
    proc = subprocess.run(["sendov-cert", "certify", "9.9"], capture_output=True, text=True)
    assert proc.returncode == EXIT_USAGE
    assert "unknown condition" in proc.stderr
