"""Tests for the command line interface."""

import json

import numpy as np
import pytest

from quantmimo import baselines, cli, harness, sdr


@pytest.fixture
def instance_file(tmp_path):
    rng = np.random.default_rng(14)
    h = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    data = {
        "n_tx": 2,
        "n_users": 2,
        "bits": 1,
        "eta": 0.2,
        "h_est_real": h.real.tolist(),
        "h_est_imag": h.imag.tolist(),
        "s_real": [0.7, -0.7],
        "s_imag": [0.7, 0.7],
    }
    path = tmp_path / "instance.json"
    path.write_text(json.dumps(data))
    return path


@pytest.fixture
def config_file(tmp_path):
    data = {
        "n_tx": 4,
        "n_users": 2,
        "bits": [1],
        "eta": [0.1],
        "snr_db_list": [6.0],
        "scheme": "QPSK",
        "trials": 3,
        "master_seed": 7,
        "precoder_id": "zf_quantized",
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return path


class TestSolveCommand:
    def test_prints_solution(self, instance_file, capsys):
        code = cli.main(["solve", "--instance", str(instance_file), "--seed", "1"])
        out = capsys.readouterr().out
        assert code == 0
        assert "epsilon" in out and "kappa" in out
        assert "rounded_objective" in out

    def test_rounded_matches_library_path(self, instance_file, capsys):
        cli.main(["solve", "--instance", str(instance_file), "--seed", "5"])
        out = capsys.readouterr().out
        printed = float(
            [ln for ln in out.splitlines() if "rounded_objective" in ln][0]
            .split()[-1]
        )
        instance, qspec = cli._load_instance(instance_file)
        model = sdr.assemble_robust_model(instance)
        sol = sdr.solve_relaxation(model, {"engine": "fast"})
        x_r, v_hat = sdr.round_solution(
            sol.v_star, instance, qspec.step, 50, np.random.default_rng(5)
        )
        lib = sdr.sign_vector_objective(v_hat, instance, qspec.step)
        assert printed == pytest.approx(lib, rel=1e-8)

    def test_missing_key_is_reported(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"n_tx": 1}))
        code = cli.main(["solve", "--instance", str(bad)])
        assert code == 2
        assert "missing key" in capsys.readouterr().err


class TestOracleCommand:
    def test_matches_library(self, instance_file, capsys):
        code = cli.main(["oracle", "--instance", str(instance_file)])
        out = capsys.readouterr().out
        assert code == 0
        printed = float(
            [ln for ln in out.splitlines() if ln.startswith("objective")][0]
            .split()[-1]
        )
        instance, qspec = cli._load_instance(instance_file)
        _, objective = baselines.exhaustive_precoder(instance, qspec.step)
        assert printed == pytest.approx(objective, rel=1e-9)


class TestSweepCommand:
    def test_writes_csv_and_sidecar(self, config_file, tmp_path, capsys):
        out_csv = tmp_path / "result.csv"
        code = cli.main(
            ["sweep", "--config", str(config_file), "--out", str(out_csv)]
        )
        assert code == 0
        records = harness.load_records(out_csv)
        assert len(records) == 1
        meta = json.loads((tmp_path / "result.csv.meta.json").read_text())
        assert meta["config"]["trials"] == 3
        assert "snr_linear" in meta["snr_definition"]

    def test_seed_override(self, config_file, tmp_path):
        a_csv = tmp_path / "a.csv"
        b_csv = tmp_path / "b.csv"
        cli.main(["sweep", "--config", str(config_file), "--out", str(a_csv),
                  "--seed", "100"])
        cli.main(["sweep", "--config", str(config_file), "--out", str(b_csv),
                  "--seed", "100"])
        assert a_csv.read_bytes() == b_csv.read_bytes()

    def test_error_mode_override_changes_results(self, config_file, tmp_path):
        a_csv = tmp_path / "a.csv"
        b_csv = tmp_path / "b.csv"
        cli.main(["sweep", "--config", str(config_file), "--out", str(a_csv),
                  "--error-mode", "bounded"])
        cli.main(["sweep", "--config", str(config_file), "--out", str(b_csv),
                  "--error-mode", "gaussian"])
        meta = json.loads((tmp_path / "b.csv.meta.json").read_text())
        assert meta["config"]["error_mode"] == "gaussian"
