import csv
import json

import pytest

from abssep import __version__
from abssep.cli import CSV_HEADER, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_classify_zeta1(capsys):
    code, doc = run_json(capsys, "classify", "--dims", "3x3", "--spectrum", "3,1,1,1,1,1,1,1,1")
    assert code == 0
    assert set(doc) == {"tool_version", "config", "result"} and doc["tool_version"] == __version__
    res = doc["result"]
    for key in ("input", "normalized_spectrum", "membership", "boundary", "extremality",
                "certificates", "margins", "distinct_eigenvalues", "scale"):
        assert key in res
    assert res["membership"]["status"] == "Member"
    assert res["extremality"]["status"] == "Extreme"
    assert res["scale"] == 11
    assert res["distinct_eigenvalues"] == 2


def test_classify_plpl_rho(capsys):
    code, doc = run_json(capsys, "classify", "--dims", "2x3", "--spectrum", "3,2,2,1,1,1")
    assert code == 0
    assert doc["result"]["boundary"] == "Boundary"
    assert doc["result"]["extremality"]["status"] == "BoundaryNonExtreme"
    assert len(doc["result"]["certificates"]["direction"]) == 6


def test_classify_human_prints_conditions(capsys):
    code, out, _ = run(capsys, "classify", "--dims", "2x2", "--spectrum", "3,1,1,1")
    assert code == 0
    assert "2 x n inequality" in out and "Extreme" in out


def test_classify_undecided_dims(capsys):
    code, doc = run_json(capsys, "classify", "--dims", "4x4", "--spectrum", ",".join(["2"] * 4 + ["1"] * 12))
    assert code == 0
    assert doc["result"]["membership"]["status"] == "UndecidedEnvelope"
    assert doc["result"]["boundary"] is None


@pytest.mark.parametrize("argv", [
    ["classify", "--dims", "2x2", "--spectrum", "1,0,0"],
    ["classify", "--dims", "2x2", "--spectrum", "a,b,c,d"],
    ["classify", "--dims", "2by2", "--spectrum", "1,0,0,0"],
    ["classify", "--dims", "2x2", "--spectrum", "1,0,0,-1"],
    ["classify", "--dims", "2x2"],
    ["robustness", "--dims", "2x2", "--preset", "rank2", "--a", "0.2"],
    ["robustness", "--dims", "2x2", "--preset", "uniform-k"],
    ["robustness", "--dims", "2x2", "--spectrum", "1,0,0,0"],
    ["scan", "--dims", "4x4", "--samples", "3"],
    ["oracle", "--dims", "3x6", "--spectrum", ",".join(["1"] * 18)],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_classify_dimension_mismatch_message(capsys):
    code, _, err = run(capsys, "classify", "--dims", "2x2", "--spectrum", "1,0,0")
    assert code == 2 and "DimensionMismatch" in err


def test_robustness_presets(capsys):
    code, doc = run_json(capsys, "robustness", "--dims", "2x2", "--preset", "pure")
    assert code == 0 and doc["result"]["value"] == pytest.approx(1.0)
    assert doc["result"]["method"] == "ClosedForm" and doc["result"]["upper_bound_only"] is False
    code, doc = run_json(capsys, "robustness", "--dims", "2x2", "--preset", "rank2", "--a", "0.9")
    assert doc["result"]["value"] == pytest.approx(0.8)
    code, doc = run_json(capsys, "robustness", "--dims", "2x3", "--preset", "uniform-k", "--k", "2")
    assert doc["result"]["value"] == pytest.approx(2 / 3)
    code, doc = run_json(capsys, "robustness", "--dims", "2x3", "--preset", "uniform-2n-2")
    assert doc["result"]["value"] == pytest.approx((3 - 2 ** 1.5) / 2)


def test_robustness_estimate(capsys):
    code, doc = run_json(capsys, "robustness", "--dims", "2x3", "--spectrum", "0.4,0.3,0.3,0,0,0",
                         "--estimate")
    res = doc["result"]
    assert code == 0 and res["method"] == "Estimator"
    assert res["bisection_width"] <= 1e-6 and res["value"] >= 1 / 3 - 1e-9


def test_robustness_member_has_null_sigma(capsys):
    code, doc = run_json(capsys, "robustness", "--dims", "2x2", "--spectrum", "1,1,1,1", "--estimate")
    assert code == 0 and doc["result"]["value"] == 0 and doc["result"]["optimal_sigma"] is None


def test_scan_csv_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, _, _ = run(capsys, "scan", "--dims", "2x3", "--samples", "50", "--seed", "4",
                         "--format", "csv", "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(a.read_text().splitlines(), delimiter=";"))
    assert rows[0] == CSV_HEADER == "spectrum;member;boundary;extreme;distinct;l1;l2;purity".split(";")
    assert len(rows) == 51
    for row in rows[1:]:
        assert len(row[0].split(",")) == 6 and row[1] in ("true", "false") and row[6] == ""
    c = tmp_path / "c.csv"
    run(capsys, "scan", "--dims", "2x3", "--samples", "50", "--seed", "5", "--format", "csv", "--out", str(c))
    assert c.read_bytes() != a.read_bytes()


def test_scan_3x3_columns(capsys):
    code, out, _ = run(capsys, "scan", "--dims", "3x3", "--samples", "5", "--format", "csv")
    rows = [r.split(";") for r in out.strip().splitlines()]
    assert code == 0 and len(rows) == 6
    assert all(r[5] and r[6] for r in rows[1:])


def test_scan_io_failure(capsys):
    code, _, err = run(capsys, "scan", "--dims", "2x2", "--samples", "2", "--out", "/nonexistent/dir/x.csv")
    assert code == 2 and "cannot write" in err


def test_oracle_agreement_cases(capsys):
    code, doc = run_json(capsys, "oracle", "--dims", "3x3", "--spectrum", "2,2,2,1,1,1,1,1,1",
                         "--samples", "2000")
    assert code == 0 and not doc["result"]["disagreement"]
    assert doc["result"]["witness"] is None
    code, doc = run_json(capsys, "oracle", "--dims", "3x3", "--spectrum", "15,14,9,9,9,9,9,9,1",
                         "--samples", "5000")
    assert code == 0 and doc["result"]["oracle_violated"] and doc["result"]["criterion"] == "NonMember"
    code, doc = run_json(capsys, "oracle", "--dims", "2x2", "--spectrum", "4,3,2,1", "--samples", "1000")
    assert code == 0 and not doc["result"]["oracle_violated"]


def test_oracle_disagreement_exit_code(capsys, monkeypatch):
    import abssep.oracle as oracle
    from abssep.oracle import MCResult

    monkeypatch.setattr(oracle, "mc_ap_check", lambda s, n, seed: MCResult(-1.0, True, n, -1.0, -1.0))
    code, out, _ = run(capsys, "oracle", "--dims", "2x2", "--spectrum", "4,3,2,1", "--samples", "10")
    assert code == 3 and "DISAGREEMENT" in out


def test_catalog_commands(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0 and len(out.strip().splitlines()) >= 12
    code, out, _ = run(capsys, "catalog", "verify")
    assert code == 0 and "FAIL" not in out
    code, out, _ = run(capsys, "catalog", "verify", "--tol", "1e-6")
    assert code == 0 and "FAIL" not in out


def test_catalog_verify_failure_exit(capsys, monkeypatch):
    from abssep import catalog
    from abssep.catalog import ClaimResult

    monkeypatch.setattr(catalog, "verify_all", lambda tol: [ClaimResult("x", "member", False, "forced")])
    code, out, _ = run(capsys, "catalog", "verify")
    assert code == 1 and "FAIL" in out


def test_json_has_no_nan(capsys):
    code, out, _ = run(capsys, "classify", "--dims", "3x3", "--spectrum", "1,1,1,1,1,1,1,1,0",
                       "--format", "json")
    assert code == 0 and "NaN" not in out and "Infinity" not in out
    json.loads(out)


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "abssep", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
