import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from eigsmooth import LtiSystem
from eigsmooth.cli import run
from eigsmooth.lti import matrix_to_json

MANIFEST_KEYS = {"tool", "version", "subcommand", "options", "input_digests", "started", "elapsed_seconds"}


@pytest.fixture
def jordan2(tmp_path):
    path = tmp_path / "jordan2.json"
    path.write_text(json.dumps({"A": matrix_to_json(np.array([[0, 1], [0, 0]]))}))
    return path


@pytest.fixture
def sys42(tmp_path):
    path = tmp_path / "s42.json"
    assert run(["gen-system", "--seed", "42", "--n", "6", "--m", "2", "--p", "2", "--out", str(path)]) == 0
    return path


def test_numrad_prints_half(jordan2, capsys):
    assert run(["numrad", "--in", str(jordan2), "--tol", "1e-10"]) == 0
    assert capsys.readouterr().out.strip() == "0.5"


def test_hinf_unstable_exit_2(tmp_path, capsys):
    path = tmp_path / "unstable.json"
    assert run(["gen-system", "--seed", "3", "--n", "4", "--m", "1", "--p", "1", "--unstable",
                "--out", str(path)]) == 0
    assert not LtiSystem.load(path).is_stable()
    assert run(["hinf", "--in", str(path)]) == 2
    assert "A not asymptotically stable" in capsys.readouterr().err


def test_gen_system_deterministic_and_stable(tmp_path, sys42):
    other = tmp_path / "again.json"
    run(["gen-system", "--seed", "42", "--n", "6", "--m", "2", "--p", "2", "--out", str(other)])
    assert other.read_bytes() == sys42.read_bytes()
    assert LtiSystem.load(sys42).is_stable()


def test_counterexample_verify(capsys):
    assert run(["counterexample", "verify", "--sk", "a", "--kmax", "25"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["c3_plausible"] is True and d["isolated"] is True
    assert set(d["manifest"]) == MANIFEST_KEYS


def test_hinf_json_manifest(sys42, capsys):
    assert run(["hinf", "--in", str(sys42), "--report", "json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["optimum"] == pytest.approx(12.298286584029896, abs=1e-7)
    assert set(d["manifest"]) == MANIFEST_KEYS
    assert str(sys42) in d["manifest"]["input_digests"]


def test_hinf_csv_with_sidecar(sys42, tmp_path):
    out = tmp_path / "h.csv"
    assert run(["hinf", "--in", str(sys42), "--report", "csv", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["iteration", "level", "intervals", "max_width"]
    assert len({len(r) for r in rows}) == 1
    assert set(json.loads((tmp_path / "h.csv.manifest.json").read_text())) == MANIFEST_KEYS


def test_plot_data_csv(tmp_path):
    out = tmp_path / "f1.csv"
    assert run(["counterexample", "plot-data", "--sk", "two", "--figure", "f1_only",
                "--resolution", "1000", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert len(rows) == 1001 and {len(r) for r in rows} == {3}


def test_passivity_cli(tmp_path, capsys):
    path = tmp_path / "p.json"
    one = np.ones((1, 1))
    LtiSystem(-one, one, one, one).dump(path)
    assert run(["passivity", "--in", str(path), "--report", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["optimum"] == pytest.approx(2.0, abs=1e-4)


def test_passivity_precondition(tmp_path, capsys):
    path = tmp_path / "p0.json"
    one = np.ones((1, 1))
    LtiSystem(-one, one, one, 0 * one).dump(path)
    assert run(["passivity", "--in", str(path)]) == 2
    assert "not strictly passive" in capsys.readouterr().err


def test_probe_cli(tmp_path, capsys):
    path = tmp_path / "fam.json"
    coeffs = [np.zeros((2, 2)), np.diag([1.0, -1.0])]
    path.write_text(json.dumps({"type": "hermitian", "coefficients": [matrix_to_json(c) for c in coeffs]}))
    assert run(["probe", "--in", str(path), "--at", "0"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["probe"]["smooth"] is False


def test_maxfun_demo(capsys):
    assert run(["maxfun-demo", "--family", "two_piece_c1"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["stationarity"]["converges_to_zero"] is True
    assert d["quadratic_models"]["left"]["curvature"] == -1.0


def test_bad_arguments(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["hinf", "--bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run([])
    assert exc.value.code == 2


def test_missing_input_exit_2(tmp_path, capsys):
    assert run(["hinf", "--in", str(tmp_path / "nope.json")]) == 2


def test_module_entry_point(jordan2):
    out = subprocess.run([sys.executable, "-m", "eigsmooth", "numrad", "--in", str(jordan2), "--tol", "1e-10"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "0.5"


def test_passivity_csv_columns(tmp_path, capsys):
    path = tmp_path / "p.json"
    one = np.ones((1, 1))
    LtiSystem(-one, one, one, one).dump(path)
    assert run(["passivity", "--in", str(path), "--report", "csv"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == ["iteration", "xi", "gamma", "stable_shift"]
    assert len({len(r) for r in rows}) == 1 and float(rows[1][2]) == pytest.approx(2.0, abs=1e-6)


def test_stdout_csv_manifest_on_stderr(capsys):
    assert run(["counterexample", "coeffs", "--sk", "a", "--kmax", "3"]) == 0
    cap = capsys.readouterr()
    rows = list(csv.reader(cap.out.splitlines()))
    assert len(rows) == 5 and len({len(r) for r in rows}) == 1
    assert set(json.loads(cap.err.splitlines()[0])) == MANIFEST_KEYS
