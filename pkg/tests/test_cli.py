import csv
import io
import json
import subprocess
import sys

import pytest

from wavelife import cli, kernels


@pytest.fixture(autouse=True)
def _keep_backend(monkeypatch):
    # --backend writes the environment variable; keep that local to each test
    monkeypatch.delenv(kernels.ENV_VAR, raising=False)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_json(capsys):
    code, out, _ = run(capsys, "classify", "--kind", "SinglePowerU", "--N", "3", "--p", "2")
    doc = json.loads(out)
    assert code == 0 and doc["law"]["form"] == "PowerLaw" and doc["law"]["exponent"] == 0.5


def test_classify_csv_and_fraction(capsys):
    code, out, _ = run(capsys, "classify", "--kind", "SinglePowerU", "--N", "2", "--p", "5/2", "--format", "csv")
    row = next(csv.DictReader(io.StringIO(out)))
    assert code == 0 and row["form"] == "PowerLaw"
    assert float(row["exponent"]) == pytest.approx(13 / 30)


def test_classify_from_config(capsys):
    code, out, _ = run(capsys, "classify", "--config", "configs/strauss_1d.ini")
    assert code == 0 and json.loads(out)["law"]["exponent"] == 1.0


def test_usage_errors(capsys):
    assert run(capsys, "classify", "--kind", "SinglePowerU", "--N", "3")[0] == 2
    assert run(capsys, "classify", "--kind", "SinglePowerU", "--N", "3", "--p", "1")[0] == 2
    assert run(capsys, "simulate", "--config", "nope.ini")[0] == 2
    assert run(capsys, "sweep")[0] == 2


def test_trace_curve_to_directory(capsys, tmp_path):
    code, out, _ = run(capsys, "trace-curve", "--kind", "SystemSG", "--N", "3", "--p-min", "1.5", "--p-max", "4",
                       "--resolution", "12", "--out", str(tmp_path), "--format", "csv")
    assert code == 0
    path = out.strip().splitlines()[-1]
    assert path.endswith("trace_curve.csv") or path.endswith(".csv")
    assert len(open(path).read().splitlines()) > 2


def test_phi_values_and_suite(capsys):
    code, out, _ = run(capsys, "phi", "--beta", "3", "--N", "3", "--r", "0.5", "--t", "1.0")
    assert code == 0 and "schema" in json.loads(out)
    code, _, err = run(capsys, "phi", "--suite", "--N", "3")
    assert code == 0 and "PASS" in err


def test_quad(capsys):
    code, out, _ = run(capsys, "quad", "psi-bounds", "--k", "4", "--n", "20001")
    assert code == 0
    code, out, _ = run(capsys, "quad", "int-phi", "--N", "3", "--beta", "2.5", "--p", "2")
    assert code == 0


def test_ode_lemma(capsys):
    code, out, _ = run(capsys, "ode-lemma", "--p1", "2", "--p2", "2", "--deltas", "0.2,0.1")
    assert code == 0
    assert run(capsys, "ode-lemma", "--p1", "2", "--p2", "3.5")[0] == 2


def _ini(tmp_path, body):
    p = tmp_path / "c.ini"
    p.write_text(body)
    return str(p)


SHORT = """[problem]
kind = SinglePowerU
N = 1
p = 3

[solver]
epsilon = 0.4
dr = 0.02
t_max = 120

[sweep]
epsilons = 0.4, 0.3, 0.2, 0.15
tol = 0.1
tol_rel = 0.3
"""


def test_simulate(capsys, tmp_path):
    cfg = _ini(tmp_path, SHORT)
    code, out, _ = run(capsys, "simulate", "--config", cfg)
    assert code == 0 and json.loads(out)["cause"] == "threshold"
    code, out, _ = run(capsys, "simulate", "--config", cfg, "--certify")
    assert code == 0 and json.loads(out)["converged"]
    code, out, _ = run(capsys, "simulate", "--config", cfg, "--out", str(tmp_path / "o"), "--backend", "python")
    assert code == 0 and (tmp_path / "o" / "report.json").exists()


def test_sweep_then_fit(capsys, tmp_path):
    cfg = _ini(tmp_path, SHORT)
    code, out, _ = run(capsys, "sweep", "--config", cfg, "--out", str(tmp_path))
    assert code == 0
    sweep = str(tmp_path / "sweep.json")
    code, out, _ = run(capsys, "fit", "--input", sweep, "--tol-rel", "0.3")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "consistent"
    # a tolerance the data cannot meet gives exit code 1
    assert run(capsys, "fit", "--input", sweep, "--tol-rel", "1e-4")[0] == 1
    code, out, _ = run(capsys, "sweep", "--config", cfg, "--format", "csv", "--out", str(tmp_path))
    code, out, _ = run(capsys, "fit", "--input", str(tmp_path / "sweep.csv"), "--kind", "SinglePowerU", "--N", "1",
                       "--p", "3", "--tol-rel", "0.3")
    assert code == 0 and json.loads(out)["n_points"] == 4


def test_verify_subset_and_coarse(capsys):
    code, out, err = run(capsys, "verify", "--suites", "exponents,classify")
    rep = json.loads(out)
    assert code == 0 and rep["ok"] and rep["summary"]["failed"] == 0
    assert "seconds" not in rep["checks"][0]
    code, out, err = run(capsys, "verify", "--suites", "hypergeometric", "--coarse", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and any(r["status"] == "SKIP" for r in rows)


def test_verify_unknown_suite(capsys):
    assert run(capsys, "verify", "--suites", "nope")[0] == 2


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "wavelife.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "wavelife" in out.stdout
