# SPDX-License-Identifier: GPL-3.0+

import csv
import json

import pytest

from pbgdecay import __version__
from pbgdecay.main import _status, load_reference, main


def _run(tmp_path, verb, *settings, name="out"):
    out = tmp_path / name
    argv = [verb, "-o", str(out)]
    for item in settings:
        argv += ["-s", item]
    return main(argv), out


def test_run_laplace(tmp_path):
    code, out = _run(tmp_path, "run", "methods=laplace", "points=12", "t_max=100")
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["schema_version"] == 1
    derived = manifest["derived"]
    assert derived["params"]["tau"] == pytest.approx(18.0)
    assert derived["tail_powers"] == {"population": -3.0, "coherence": -1.5}
    assert derived["rational"]["q"] == 2 and derived["rational"]["roots"]["degree"] == 6
    assert 0 < derived["bound_state"]["residue"] < 1
    with open(out / "trajectory_laplace.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "rho11", "Re(rho10)", "Im(rho10)", "abs_rho10", "method", "err_bound"]
    assert len(rows) == 13
    assert all(row[5] == "laplace" and float(row[6]) >= 0 for row in rows[1:])


def test_manifest_is_deterministic(tmp_path):
    settings = ("methods=laplace", "points=6", "t_max=10")
    _, first = _run(tmp_path, "run", *settings, name="a")
    _, second = _run(tmp_path, "run", *settings, name="b")
    assert (first / "manifest.json").read_bytes() == (second / "manifest.json").read_bytes()


def test_run_reports_max_delta(tmp_path, capsys):
    code, out = _run(tmp_path, "run", "methods=series, laplace", "points=10", "t_max=1")
    assert code == 0
    assert "series vs laplace: max |delta G|" in capsys.readouterr().out
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["comparison"][0]["max_delta"] <= 1e-6
    assert (out / "comparison.csv").exists()


def test_invalid_alpha_exits_1(tmp_path, capsys):
    code, _ = _run(tmp_path, "run", "alpha=1.5")
    assert code == 1
    assert "alpha must lie strictly inside (0, 1)" in capsys.readouterr().out


def test_numerical_failure_exits_2(tmp_path, capsys):
    # a Volterra tolerance below rounding can never be met
    code, _ = _run(tmp_path, "run", "methods=volterra", "points=3", "t_min=0.1", "t_max=0.5", "volterra_tol=1e-16")
    assert code == 2
    assert "method=volterra" in capsys.readouterr().out


def test_compare_pass_and_negative_control(tmp_path):
    code, out = _run(tmp_path, "compare", "methods=series, laplace", "points=10", "t_max=1")
    assert code == 0
    report = json.loads((out / "comparison.json").read_text(encoding="utf-8"))
    assert report["pairs"][0]["status"] == "PASS"
    assert report["pairs"][0]["max_delta"] <= 1e-6
    control = report["negative_control"]
    assert control["outcome"] == "FAIL" and control["status"] == "PASS"
    assert report["status"] == "PASS"


def test_compare_asymptotic_pair(tmp_path):
    code, out = _run(tmp_path, "compare", "methods=asymptotic, laplace", "points=8", "t_min=180", "t_max=3600")
    assert code == 0
    pair = json.loads((out / "comparison.json").read_text(encoding="utf-8"))["pairs"][0]
    assert pair["relative"] and pair["part"] == "continuum"
    assert pair["status"] == "PASS"


def test_compare_needs_two_methods(tmp_path):
    code, _ = _run(tmp_path, "compare", "methods=laplace")
    assert code == 1


def test_sweep_single_entry(tmp_path):
    code, out = _run(tmp_path, "sweep", "sweep_alphas=0.5", "sweep_amplitudes=1", "fit_points=12")
    assert code == 0
    with open(out / "sweep.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    row = rows[0]
    assert row["status"] == "OK"
    assert float(row["fitted_exponent"]) == pytest.approx(-1.5, abs=0.02)
    assert float(row["predicted_exponent"]) == -1.5


def test_sweep_records_failures(tmp_path):
    code, out = _run(tmp_path, "sweep", "sweep_alphas=0.5, 1.5", "sweep_amplitudes=1", "fit_points=12")
    assert code == 0
    rows = json.loads((out / "sweep.json").read_text(encoding="utf-8"))["rows"]
    assert [r["status"] for r in rows] == ["OK", "FAIL"]
    assert "alpha" in rows[1]["error"]


@pytest.mark.slow
def test_sweep_amplitude_tracks_d_alpha(tmp_path):
    out = tmp_path / "out"
    code = main(["sweep", "-o", str(out), "-W", "3", "-s", "sweep_alphas=0.5", "-s", "sweep_amplitudes=0.5, 5, 50",
                 "-s", "fit_points=16"])
    assert code == 0
    rows = json.loads((out / "sweep.json").read_text(encoding="utf-8"))["rows"]
    for r in rows:
        assert r["status"] == "OK"
        assert r["fitted_exponent"] == pytest.approx(-1.5, abs=0.02)
        assert r["fitted_amplitude"] == pytest.approx(r["abs_D_alpha"], rel=0.05)


@pytest.mark.slow
def test_validate(tmp_path):
    code, out = _run(tmp_path, "validate")
    report = json.loads((out / "validate.json").read_text(encoding="utf-8"))
    by_check = {}
    for r in report["results"]:
        by_check.setdefault(r["check"], []).append(r)
    assert set(by_check) == {"series", "volterra", "tail", "asymptotic_coefficient", "rational", "negative_control"}
    for name, rows in by_check.items():
        assert all(r["status"] == "PASS" for r in rows), rows
    assert len(by_check["volterra"]) == 4
    small_alpha = [r for r in by_check["tail"] if r["config"]["alpha"] == 0.2]
    assert small_alpha[0]["outcome"] == "FAIL" and small_alpha[0]["expected"] == "FAIL"
    assert report["status"] == "PASS"
    assert code == 0


def test_version(capsys):
    with pytest.raises(SystemExit):
        main(["--version"])
    assert __version__ in capsys.readouterr().out


@pytest.mark.parametrize("outcome, expected, status", [
    ("PASS", "PASS", "PASS"),
    ("FAIL", "FAIL", "PASS"),
    ("FAIL", "PASS", "FAIL"),
    ("PASS", "FAIL", "UNEXPECTED PASS"),
])
def test_expected_outcomes(outcome, expected, status):
    assert _status(outcome, expected) == status


def test_reference_marks_small_alpha_tail():
    tail = load_reference()["tail"]["configs"]
    marked = [c for c in tail if c.get("expected") == "FAIL"]
    assert [c["alpha"] for c in marked] == [0.2]
