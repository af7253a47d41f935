import csv
import json
import subprocess
import sys

import pytest

from goldrg.cli import Config, UsageError, run


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    assert code == 0
    return json.loads(out)


def test_rotation(capsys):
    data = run_json(capsys, ["rotation", "--lambda", "3", "--energy", "0", "--iters", "46368"])
    assert abs(data["value"] - 0.25) < 1e-3
    assert abs(data["lift"] - data["value"]) <= 1 / 46368


def test_lyapunov(capsys):
    data = run_json(capsys, ["lyapunov", "--lambda", "3", "--energy", "0", "--iters", "10946"])
    assert abs(data["value"] - 1.0986) < 0.02


def test_curve_csv(tmp_path):
    out = tmp_path / "curve.csv"
    assert run(["curve", "find", "--rho", "1/4", "--delta-grid", "0.1:0.3:0.1", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0].keys()) == ["delta", "epsilon", "residual", "plateau_width"]
    assert [float(r["delta"]) for r in rows] == [0.1, 0.2, 0.3]
    assert all(abs(float(r["epsilon"])) < 1e-6 for r in rows)


def test_zeros_run(capsys):
    data = run_json(capsys, ["zeros", "run", "--rho", "1/4", "--steps", "2"])
    assert data[0]["A"] == ["1/4"] and data[0]["B"] == []
    assert data[1]["B"] == ["1/4"] and data[2]["A"] == ["1/4"]


def test_zeros_gaps(capsys):
    data = run_json(capsys, ["zeros", "run", "--rho", "1/4", "--steps", "1", "--window", "3"])
    assert set(data[1]["gaps_A"]) <= {"1", "1+a"}


def test_rg_iterate_roundtrip(tmp_path):
    out = tmp_path / "rg.json"
    assert run(["rg", "iterate", "--delta", "0.2", "--epsilon", "0", "--n", "2", "--steps", "2", "--out", str(out)]) == 0
    recs = json.loads(out.read_text())
    assert len(recs) == 3 and recs[2]["log_singular_ratio_A"] < recs[1]["log_singular_ratio_A"]
    assert json.loads(json.dumps(recs)) == recs


def test_rg_sigma_mode(capsys):
    recs = run_json(capsys, ["rg", "iterate", "--delta", "0.2", "--n", "1", "--steps", "1", "--L", "S-sigma"])
    assert "sigma" in recs[1]


def test_limitfn_build(tmp_path):
    out = tmp_path / "limit.json"
    assert run(["limitfn", "build", "--rho", "1/4", "--cutoff", "100", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["n"] == 2 and data["a"]["zeros"][0] == "1/4"
    from goldrg.limits import FixedPointPair

    FixedPointPair.from_json(data)


def test_analytic(capsys):
    assert run_json(capsys, ["analytic", "norm", "--coeffs", "1,-2,4", "--radius", "0.5"])["norm"] == 3.0
    data = run_json(capsys, ["analytic", "compose", "--coeffs", "0,1", "--radius", "1", "--scale", "0.5",
                             "--shift", "0.25", "--out-radius", "1"])
    assert data["coeffs"] == [0.25, 0.5]


def test_analytic_domain_error(capsys):
    assert run(["analytic", "compose", "--coeffs", "0,1", "--radius", "1", "--scale", "1",
                "--shift", "0.5", "--out-radius", "1"]) == 1


def test_verify_suite(capsys):
    assert run(["verify", "--suite", "golden"]) == 0
    assert "[PASS]" in capsys.readouterr().out


def test_usage_errors(capsys):
    assert run(["bogus"]) == 2
    assert run(["verify", "--suite", "nope"]) == 2
    assert run(["zeros", "run", "--rho", "x+"]) == 2
    assert run(["curve", "find", "--rho", "1/4", "--delta-grid", "0.1:0.3:-1"]) == 2


def test_computation_error(capsys):
    assert run(["zeros", "run", "--rho", "1/2"]) == 1
    assert "SpecialGap" in capsys.readouterr().err


def test_config(tmp_path, capsys):
    cfg = tmp_path / "goldrg.cfg"
    cfg.write_text("# settings\nradii = 0.4, 0.6\ntruncation_degree = 48\ntol.converge = 1e-8\nthreads = 1\n")
    c = Config.load(str(cfg))
    assert c.truncation_degree == 48 and c.tolerances == {"converge": 1e-8}
    bad = tmp_path / "bad.cfg"
    bad.write_text("radii = 0.2, 0.6\n")
    assert run(["--config", str(bad), "lyapunov", "--lambda", "1", "--iters", "10"]) == 2
    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("colour = blue\n")
    with pytest.raises(UsageError):
        Config.load(str(unknown))


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "goldrg", "verify", "--suite", "golden"], capture_output=True, text=True)
    assert res.returncode == 0 and "[PASS]" in res.stdout
