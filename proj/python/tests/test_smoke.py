import json
import math
import os
import pathlib
import subprocess

import pytest

cmqop = pytest.importorskip("cmqop")

ROOT = pathlib.Path(__file__).resolve().parents[2]
SCHEMA = json.loads((ROOT / "schema" / "report-v1.schema.json").read_text())


def cli_path():
    path = os.environ.get("CMQOP_CLI", str(ROOT / "build" / "cmqop"))
    if not os.access(path, os.X_OK):
        pytest.skip("cmqop binary not built")
    return path


def test_version():
    assert cmqop.__version__ == "0.1.0"


def test_fourier_gamma_closed_forms():
    assert cmqop.cosh_fourier_gamma(0.0, 2.0) == pytest.approx(1.0, rel=1e-14)
    for v in (0.0, 0.4, 1.7):
        assert cmqop.cosh_fourier_gamma(v, 1.0) == pytest.approx(math.pi / math.cosh(math.pi * v), rel=1e-13)


def test_free_case_hypergeometric():
    v = 1.3
    for s in (1.0, 2.5, 5.0):
        got = cmqop.extended_hypergeom([v / 2, -v / 2], 1.0, [-s / 2, s / 2])
        assert abs(got - math.sin(v * s / 2) / (v * math.sinh(s / 2))) < 1e-10


def test_mu_and_difference_equation():
    u = [0.6, -0.2]
    assert cmqop.eigenvalue_mu(0.2, u, 1.5) > 0
    assert cmqop.difference_eq_residual(0.4, u, 1.7) < 1e-12
    with pytest.raises(cmqop.PoleError):
        cmqop.log_gamma(-2.0)


def test_coefficient_table():
    rows = cmqop.hc_coefficients([0.5j, -0.5j], 1.0, 6)
    assert len(rows) == 7
    assert all(abs(d - 1) < 1e-13 for _, d in rows)


def test_run_and_schema():
    jsonschema = pytest.importorskip("jsonschema")
    report = cmqop.run("diff-eq", N=3, lam=1.7, seed=3)
    jsonschema.validate(report, SCHEMA)
    assert report["pass"]
    assert report["config"]["seed"] == 3
    again = cmqop.run("diff-eq", N=3, lam=1.7, seed=3)
    assert again["checks"] == report["checks"]


def test_config_errors():
    with pytest.raises(cmqop.ConfigError):
        cmqop.run("diff-eq", bogus=1)
    with pytest.raises(cmqop.ConfigError):
        cmqop.run("int-eq", N=5)


def test_cli_exit_codes(tmp_path):
    exe = cli_path()
    out = tmp_path / "r.json"
    ok = subprocess.run([exe, "diff-eq", "--N", "2", "--lambda", "1.7", "--json", str(out)], capture_output=True)
    assert ok.returncode == 0
    report = json.loads(out.read_text())
    jsonschema = pytest.importorskip("jsonschema")
    jsonschema.validate(report, SCHEMA)

    fail = subprocess.run([exe, "diff-eq", "--tol", "1e-300"], capture_output=True)
    assert fail.returncode == 1
    bad = subprocess.run([exe, "diff-eq", "--lambda", "-1"], capture_output=True, text=True)
    assert bad.returncode == 2
    assert "lambda" in bad.stderr
    numeric = subprocess.run([exe, "l2-eigen", "--t=0,0.001"], capture_output=True)
    assert numeric.returncode == 3


def test_cli_config_file_and_sweep(tmp_path):
    exe = cli_path()
    cfg = tmp_path / "run.cfg"
    cfg.write_text("N = 2\nlambda = 2.5\nu = 0.5,-0.3\n")
    csv = tmp_path / "sweep.csv"
    res = subprocess.run(
        [exe, "diff-eq", "--config", str(cfg), "--draws", "0", "--sweep", "xi", "--values=-1,0.1,1",
         "--csv", str(csv), "-q"],
        capture_output=True,
    )
    assert res.returncode == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "axis,value,pass,metric,metric_value,mu_xi,worst_ratio,wall_time_ms,error"
    mu = [float(line.split(",")[5]) for line in lines[1:]]
    assert len(mu) == 3 and mu[1] > mu[0] and mu[1] > mu[2]
