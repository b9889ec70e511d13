import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from quatode.checks import example3_closed_form
from quatode.cli import build_solve_report, main
from quatode.oracle import read_csv
from quatode.qexpr import sample
from quatode.scenario import load_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return path


def test_solve_example1(capsys, tmp_path):
    out_json = tmp_path / "r.json"
    code, out, _ = run(capsys, "solve", SCENARIOS / "example1.json", "--json", out_json)
    assert code == 0
    assert "|W|^2 at x0=0: 5 " in out
    report = json.loads(out_json.read_text())
    assert abs(report["wronskian_squared_x0"] - 5.0) < 1e-12
    assert report["independent"]
    # the printed partner does not solve the equation and the report says so
    assert not report["basis_solves_equation"]
    assert "warning" in out


def test_solve_example2_reduction(capsys):
    code, out, _ = run(capsys, "solve", SCENARIOS / "example2.json", "--json", "-")
    assert code == 0
    report = json.loads(out)
    assert report["basis_source"] == "reduction of order"
    assert report["basis_solves_equation"]
    assert report["wronskian_squared_x0"] == pytest.approx(1.0, abs=1e-12)


def test_solve_example4_particular(capsys):
    code, out, _ = run(capsys, "solve", SCENARIOS / "example4.json", "--json", "-")
    assert code == 0
    p = json.loads(out)["particular"]
    assert p["normalized"] and p["closed_form_gap"] < 1e-6
    values = {s["x"]: s["value"] for s in p["samples"]}
    assert np.allclose(values[0.0], [0, 0, 0, 0.5], atol=1e-6)
    assert np.allclose(values[1.0], [0, 0.5, 0.5, 0.5], atol=1e-6)
    assert p["residual_max"] < 1e-8


def test_solve_with_initial_data(capsys, tmp_path):
    data = json.loads((SCENARIOS / "example4.json").read_text())
    data.update(f=[1, 0, 1, 0], g=[0, 0, 0, 1])
    code, out, _ = run(capsys, "solve", write(tmp_path, "s.json", data), "--json", "-")
    assert code == 0
    ic = json.loads(out)["initial_conditions"]
    assert ic["mismatch"] < 1e-10


def test_json_round_trip(capsys, tmp_path):
    for name in ("example1", "example2", "example3", "example4"):
        report = build_solve_report(load_scenario(SCENARIOS / f"{name}.json"))
        text = json.dumps(report, allow_nan=False)
        assert json.loads(text) == report


def test_deterministic_output(capsys):
    first = run(capsys, "solve", SCENARIOS / "example4.json")
    second = run(capsys, "solve", SCENARIOS / "example4.json")
    assert first == second


def test_exit_codes(capsys, tmp_path):
    code, _, err = run(capsys, "solve", write(tmp_path, "empty.json", ""))
    assert code == 2 and "ScenarioError" in err
    code, _, err = run(capsys, "solve", tmp_path / "missing.json")
    assert code == 2
    bad_root = {"kind": "homogeneous-const", "a": [0, 0, -1, 0], "b": [-1, 0, 0, 1],
                "q": [0, 0, 1, 0]}
    code, _, err = run(capsys, "solve", write(tmp_path, "root.json", bad_root))
    assert code == 3 and err.startswith("NotASolution")
    dependent = {"kind": "homogeneous-const", "a": [0, 0, -1, 0], "b": [-1, 0, 0, 1],
                 "basis": {"phi": {"exp": [0, -1, 0, 0]},
                           "xi": {"rscale": [{"exp": [0, -1, 0, 0]}, [0, 0, 0, 1]]}}}
    code, _, err = run(capsys, "solve", write(tmp_path, "dep.json", dependent))
    assert code == 3 and err.startswith("DependentPair")
    code, _, err = run(capsys, "integrate", SCENARIOS / "example1.json", "--out", tmp_path / "x.csv")
    assert code == 2 and "kind" in err
    blow = {"kind": "ivp-numeric", "a": [1000, 0, 0, 0], "b": [0, 0, 0, 0],
            "f": [1, 0, 0, 0], "g": [1, 0, 0, 0], "x_end": 20, "h": 0.5}
    code, _, err = run(capsys, "integrate", write(tmp_path, "blow.json", blow), "--out", tmp_path / "b.csv")
    assert code == 4 and err.startswith("NonFiniteState")


def test_integrate_example1(capsys, tmp_path):
    csv_path = tmp_path / "t.csv"
    code, out, _ = run(capsys, "integrate", SCENARIOS / "example1_ivp.json", "--out", csv_path)
    assert code == 0 and "max residual norm" in out
    data = read_csv(csv_path)
    assert data["x"][-1] == 2.0
    final = [data[c][-1] for c in ("psi0", "psi1", "psi2", "psi3")]
    assert np.allclose(final, [math.cos(2), -math.sin(2), 0, 0], atol=1e-5)


def test_integrate_example3(capsys, tmp_path):
    csv_path = tmp_path / "t.csv"
    assert run(capsys, "integrate", SCENARIOS / "example3_ivp.json", "--out", csv_path)[0] == 0
    data = read_csv(csv_path)
    psi = np.column_stack([data[f"psi{n}"] for n in range(4)])
    assert np.max(np.abs(psi - sample(example3_closed_form(), data["x"]))) < 1e-5


def test_integrate_zero_ivp_and_step_override(capsys, tmp_path):
    csv_path = tmp_path / "z.csv"
    code, out, _ = run(capsys, "integrate", SCENARIOS / "zero_ivp.json", "--out", csv_path, "--h", "0.25")
    assert code == 0
    data = read_csv(csv_path)
    assert list(data["x"]) == [0.0, 0.25, 0.5, 0.75, 1.0]
    for col in ("psi0", "psi1", "psi2", "psi3", "dpsi0", "dpsi1", "dpsi2", "dpsi3"):
        assert np.all(data[col] == 0.0)
    code, _, _ = run(capsys, "integrate", SCENARIOS / "zero_ivp.json", "--out", csv_path, "--h", "-1")
    assert code == 2


def test_wronskian_command(capsys):
    code, out, _ = run(capsys, "wronskian", SCENARIOS / "wronskian_example1.json", "--x", "1.3", "--json", "-")
    assert code == 0
    report = json.loads(out)
    assert report["wronskian_squared"] == pytest.approx(5.0, abs=1e-10)
    assert report["dieudonne_det_squared"] == pytest.approx(5.0, abs=1e-10)
    assert not report["dependent"]
    assert len(report["variants"]) == 4
    # the reduction partner vanishes at 0, so the inverse-based variants are undefined there
    code, out, _ = run(capsys, "wronskian", SCENARIOS / "example2.json", "--x", "0")
    assert code == 0 and "variants undefined" in out


def test_verify_list(capsys):
    code, out, _ = run(capsys, "verify-paper", "--list")
    names = out.split()
    assert code == 0 and names == sorted(names)
    assert "example1_residual" in names and "wronskian_scaling" in names


def test_verify_negative_control(capsys):
    code, out, _ = run(capsys, "verify-paper", "--perturb", "1e-3")
    assert code == 1
    rows = {line.split()[0]: line.split()[1] for line in out.splitlines() if "  " in line}
    assert rows["example1_residual"] == "FAIL"


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "quatode.cli", "--help"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    for cmd in ("solve", "integrate", "wronskian", "verify-paper"):
        assert cmd in proc.stdout
