import json
import math
import subprocess
import sys

import numpy as np
import pytest

from quadham.catalog import build
from quadham.cli import main
from quadham.export import read_sweep_csv, sweep_csv
from quadham.report import AnalysisReport, analyze, from_cmatrix, load_matrix_file, matrix_to_dict, dumps
from quadham.sweep import SweepAxis, sweep


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- analyze ------------------------------------------------------------------


def test_analyze_real(capsys):
    code, out, _ = run(capsys, "analyze", "--model", "toy1d", "--set", "alpha=1", "--set", "beta=1")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == 1
    assert rep["phase"]["label"] == "Real"
    vals = sorted(v["value"][0] for v in rep["eigenvalues"])
    assert vals == pytest.approx([-math.sqrt(3), math.sqrt(3)], abs=1e-12)
    assert rep["ground_energy"] == pytest.approx(math.sqrt(3) / 2, abs=1e-12)
    assert rep["pseudo_hermiticity"]["passed"] is True


def test_analyze_broken(capsys):
    code, out, _ = run(capsys, "analyze", "--model", "toy1d", "--set", "alpha=1", "--set", "beta=3")
    assert code == 0
    rep = json.loads(out)
    assert rep["phase"]["label"] == "Broken"
    assert rep["ground_energy"] is None
    ims = sorted(v["value"][1] for v in rep["eigenvalues"])
    assert ims == pytest.approx([-math.sqrt(5), math.sqrt(5)], abs=1e-12)


def test_analyze_degree_three_file(capsys, tmp_path):
    f = tmp_path / "mymodel.json"
    f.write_text(json.dumps({"name": "cubic", "K": 1, "hamiltonian": "p^2 + x^3", "parameters": {}}))
    code, out, err = run(capsys, "analyze", "--file", str(f))
    assert code == 2
    assert out == ""
    assert "degree" in err.lower()


def test_analyze_parse_error_shows_caret(capsys, tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"name": "bad", "K": 1, "hamiltonian": "p^2 + * x", "parameters": {}}))
    code, _, err = run(capsys, "analyze", "--file", str(f))
    assert code == 2
    assert "^" in err


def test_analyze_non_symmetric_exit_2(capsys, tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"name": "xp", "K": 1, "hamiltonian": "x*p", "parameters": {}}))
    assert run(capsys, "analyze", "--file", str(f))[0] == 2


def test_analyze_file_model(capsys, tmp_path):
    f = tmp_path / "osc.json"
    f.write_text(json.dumps({"name": "osc", "K": 1, "hamiltonian": "p^2 + w^2*x^2", "parameters": {"w": 3}}))
    code, out, _ = run(capsys, "analyze", "--file", str(f))
    assert code == 0
    assert json.loads(out)["ground_energy"] == pytest.approx(3.0)


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "--model", "nope"],
        ["analyze", "--model", "toy1d", "--set", "delta=1"],
        ["analyze", "--model", "toy1d", "--set", "alpha"],
        ["analyze"],
        ["analyze", "--file", "/nonexistent/model.json"],
    ],
)
def test_analyze_input_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_analyze_numerical_failure_exit_3(capsys, monkeypatch):
    monkeypatch.setenv("QUADHAM_TOL", "residual=-1")
    assert run(capsys, "analyze", "--model", "toy2d")[0] == 3


def test_report_round_trip(tmp_path):
    rep = analyze(build("gainloss"))
    back = AnalysisReport.from_json(rep.to_json())
    assert back == rep
    assert AnalysisReport.from_json(back.to_json()).to_json() == rep.to_json()
    H = from_cmatrix(back.adjoint_matrix["formula"])
    np.testing.assert_array_equal(H, build("gainloss").adjoint.entries)


def test_report_rejects_other_schema():
    d = analyze(build("toy1d")).to_dict()
    d["schema"] = 2
    with pytest.raises(ValueError):
        AnalysisReport.from_dict(d)


def test_dumps_full_precision():
    x = 0.1 + 0.2
    assert float(json.loads(dumps({"v": x}))["v"]) == x
    assert dumps([1.0, 2]) == "[1.0, 2]"


# -- verify -------------------------------------------------------------------


def test_verify_lrc_all_pass(capsys):
    code, out, _ = run(capsys, "verify", "--model", "lrc", "--set", "mu=0.2", "--set", "gamma=0.1")
    assert code == 0
    assert "fail" not in out


def test_verify_selfforce_structural_pass(capsys):
    code, out, _ = run(capsys, "verify", "--model", "selfforce")
    assert code == 0
    assert "phase Broken" in out
    for name in ("pseudo_hermiticity", "two_oracle", "pairing", "pseudo_orthogonality"):
        line = next(l for l in out.splitlines() if l.startswith(name))
        assert " pass " in line


def test_verify_corrupted_matrix_file(capsys, tmp_path):
    d = matrix_to_dict(build("toy2d").adjoint)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(d))
    assert run(capsys, "verify", "--matrix", str(good))[0] == 0
    # H[0,3] and H[1,2] both come from gamma_xy; editing one breaks the symmetry
    d["adjoint_matrix"][0][3][1] += 1e-3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    code, out, _ = run(capsys, "verify", "--matrix", str(bad))
    assert code == 1
    line = next(l for l in out.splitlines() if l.startswith("pseudo_hermiticity"))
    assert " fail " in line


def test_verify_accepts_report_file(capsys, tmp_path):
    f = tmp_path / "rep.json"
    f.write_text(analyze(build("lrc")).to_json())
    assert load_matrix_file(f).K == 2
    assert run(capsys, "verify", "--matrix", str(f))[0] == 0


def test_verify_strict_tolerance_fails(capsys):
    code, out, _ = run(capsys, "verify", "--model", "lrc", "--tol-orthogonality", "1e-30")
    assert code == 1
    # an unreachable eigenpair residual is a numerical failure, not a failed check
    assert run(capsys, "verify", "--model", "lrc", "--tol-residual", "1e-30")[0] == 3


# -- sweep --------------------------------------------------------------------


def test_sweep_cli(capsys, tmp_path):
    svg = tmp_path / "toy2d.svg"
    code, out, _ = run(capsys, "sweep", "--model", "toy2d", "--axis", "beta=-3:3:61", "--svg", str(svg))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "beta,max_im,min_pseudo_norm,phase"
    assert len(lines) == 62
    grid = read_sweep_csv(out, "toy2d")
    for c in grid.cells:
        if abs(c.values["beta"]) < 1.95:
            assert c.phase == "Real"
        if abs(c.values["beta"]) > 2.05:
            assert c.phase == "Broken"
    text = svg.read_text()
    assert text.startswith("<svg") and text.count("<rect") >= 61


def test_sweep_csv_round_trip():
    axes = [SweepAxis("gamma", 0, 1, 4), SweepAxis("epsilon", 0, 1, 3)]
    g = sweep("gainloss", {}, axes)
    text = sweep_csv(g)
    back = read_sweep_csv(text, "gainloss")
    assert [ax.n for ax in back.axes] == [4, 3]
    assert sweep_csv(back) == text
    for a, b in zip(g.cells, back.cells):
        assert a.values == b.values and a.phase == b.phase
        assert (a.max_im == b.max_im) or (math.isnan(a.max_im) and math.isnan(b.max_im))


def test_sweep_2d_files_and_jobs(capsys, tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    args = ["sweep", "--model", "gainloss", "--axis", "gamma=0:1:6", "--axis", "epsilon=0:1:5"]
    assert run(capsys, *args, "--out", str(out1))[0] == 0
    assert run(capsys, *args, "--out", str(out2), "--jobs", "2")[0] == 0
    assert out1.read_text() == out2.read_text()
    assert len(out1.read_text().splitlines()) == 31


def test_sweep_bad_axis(capsys):
    assert run(capsys, "sweep", "--model", "toy2d", "--axis", "beta=1:0:3")[0] == 2
    assert run(capsys, "sweep", "--model", "toy2d")[0] == 2


# -- boundary -----------------------------------------------------------------


def test_boundary_cli(capsys):
    code, out, _ = run(capsys, "boundary", "--model", "toy2d", "--param", "beta", "--bracket", "1:3", "--tol", "1e-6")
    assert code == 0
    assert out.strip() == "2.000000"


def test_boundary_json(capsys):
    code, out, _ = run(
        capsys, "boundary", "--model", "toy1d", "--set", "alpha=1", "--param", "beta", "--bracket", "1:3", "--json"
    )
    d = json.loads(out)
    assert abs(d["critical_value"] - 2) < 1e-6
    assert d["phase_lo"] == "Real"


def test_boundary_invalid_bracket(capsys):
    code, _, err = run(capsys, "boundary", "--model", "toy2d", "--param", "beta", "--bracket", "0:1")
    assert code == 2
    assert "straddle" in err


# -- simulate -----------------------------------------------------------------


def test_simulate_lrc_decoupled(capsys, tmp_path):
    traj = tmp_path / "traj.csv"
    code, out, _ = run(
        capsys, "simulate", "--model", "lrc", "--set", "mu=0", "--set", "gamma=0", "--T", "200", "--dt", "0.01",
        "--out", str(traj),
    )
    assert code == 0
    d = json.loads(out)
    assert d["phase"] == "Real"
    assert len(d["frequencies"]) == 1
    assert d["frequencies"][0] == pytest.approx(1.0, rel=1e-3)
    lines = traj.read_text().splitlines()
    assert lines[0] == "t,z1,z2,z3,z4"
    assert len(lines) == 20002


def test_simulate_broken(capsys):
    code, out, _ = run(capsys, "simulate", "--model", "toy1d", "--set", "beta=3", "--T", "50")
    d = json.loads(out)
    assert d["phase"] == "Broken"
    assert d["growth_rate"] == pytest.approx(d["expected_growth_rate"], rel=1e-3)


def test_simulate_bad_z0(capsys):
    assert run(capsys, "simulate", "--model", "toy2d", "--z0", "1,2")[0] == 2


# -- environment and entry point ------------------------------------------------


def test_env_tolerance_override(capsys, monkeypatch):
    monkeypatch.setenv("QUADHAM_TOL", "reality=10")
    code, out, _ = run(capsys, "analyze", "--model", "toy1d", "--set", "beta=3")
    # with an absurd reality tolerance the broken pair reads as real
    assert json.loads(out)["phase"]["label"] != "Broken"


def test_module_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "quadham", "boundary", "--model", "toy2d", "--param", "beta", "--bracket", "1:3"],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0 and r.stdout.strip() == "2.000000"
    r = subprocess.run([sys.executable, "-m", "quadham", "analyze", "--model", "nope"], capture_output=True, text=True)
    assert r.returncode == 2 and "unknown model" in r.stderr
