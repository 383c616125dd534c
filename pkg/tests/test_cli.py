import json
import os
import subprocess
import sys

import numpy as np
import pytest

from resonant.artifacts import read_series_csv, read_trial_log
from resonant.cli import main
from resonant.reservoir import ReservoirModel


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def hps_file(workdir):
    path = workdir / "hps.json"
    path.write_text(json.dumps({
        "n_nodes": 50, "spectral_radius": 1.0, "connectivity": 0.3,
        "leaking_rate": 0.05, "bias": 0.3, "regularization": 0.5,
    }))
    return str(path)


@pytest.fixture
def data_files(workdir):
    assert run_cli(
        "generate-data", "--out", "traj.csv", "--steps", "1500",
        "--force", "sin", "--amp", "0.5", "--freq", "0.3",
        "--train-out", "train.csv", "--test-out", "test.csv",
        "--force-out", "force.csv", "--split", "0.3", "--seed", "210",
    ) == 0
    return workdir


class TestGenerateData:
    def test_outputs_and_sidecar(self, data_files):
        cols = read_series_csv("traj.csv")
        assert set(cols) == {"t", "x", "p"}
        assert len(cols["t"]) == 1501
        meta = json.loads((data_files / "traj.json").read_text())
        assert meta["force"]["family"] == "sin"
        assert "config" in meta
        train = read_series_csv("train.csv")
        assert len(train["t"]) == round(0.3 * 1501)

    def test_noise_flag(self, workdir):
        assert run_cli("generate-data", "--out", "a.csv", "--steps", "200",
                       "--noise", "0.1", "--seed", "4") == 0
        assert run_cli("generate-data", "--out", "b.csv", "--steps", "200",
                       "--seed", "4") == 0
        a, b = read_series_csv("a.csv"), read_series_csv("b.csv")
        assert np.abs(a["x"] - b["x"]).max() <= 0.1

    def test_byte_identical_rerun(self, workdir):
        args = ("generate-data", "--out", "c.csv", "--steps", "300", "--seed", "9")
        assert run_cli(*args) == 0
        first = (workdir / "c.csv").read_bytes()
        assert run_cli(*args) == 0
        assert (workdir / "c.csv").read_bytes() == first


class TestFitPredictTest:
    def test_full_cycle_matches_library(self, data_files, hps_file):
        assert run_cli("fit", "--hps", hps_file, "--target", "train.csv",
                       "--feedback", "--seed", "210", "--out", "model.json") == 0
        assert run_cli("test", "--model", "model.json", "--target", "test.csv",
                       "--out", "score.json", "--pred-out", "pred.csv") == 0
        score = json.loads((data_files / "score.json").read_text())["score"]

        train = read_series_csv("train.csv")
        test = read_series_csv("test.csv")
        model = ReservoirModel.load("model.json")
        lib_score, _ = model.test(np.column_stack([test["x"], test["p"]]))
        assert score == lib_score

        pred = read_series_csv("pred.csv")
        assert set(pred) == {"t", "x_true", "x_pred", "p_true", "p_pred"}
        del train

    def test_predict_zero_steps(self, data_files, hps_file):
        run_cli("fit", "--hps", hps_file, "--target", "train.csv",
                "--seed", "210", "--out", "model.json")
        assert run_cli("predict", "--model", "model.json", "--steps", "0",
                       "--out", "empty.csv") == 0
        cols = read_series_csv("empty.csv")
        assert len(cols["step"]) == 0

    def test_model_rerun_byte_identical(self, data_files, hps_file):
        args = ("fit", "--hps", hps_file, "--target", "train.csv",
                "--feedback", "--seed", "210", "--out", "model.json")
        assert run_cli(*args) == 0
        first = (data_files / "model.json").read_bytes()
        assert run_cli(*args) == 0
        assert (data_files / "model.json").read_bytes() == first

    def test_channel_names_round_trip(self, data_files, hps_file):
        run_cli("fit", "--hps", hps_file, "--target", "train.csv",
                "--seed", "210", "--out", "model.json")
        run_cli("predict", "--model", "model.json", "--steps", "5",
                "--out", "pred.csv")
        assert set(read_series_csv("pred.csv")) == {"step", "x", "p"}

    def test_missing_file_is_validation_error(self, workdir, hps_file):
        assert run_cli("fit", "--hps", hps_file, "--target", "nope.csv",
                       "--out", "m.json") == 2


class TestPlot:
    def test_all_kinds(self, data_files, hps_file):
        run_cli("fit", "--hps", hps_file, "--target", "train.csv",
                "--feedback", "--seed", "210", "--out", "model.json")
        run_cli("test", "--model", "model.json", "--target", "test.csv",
                "--out", "score.json", "--pred-out", "pred.csv")
        for kind in ("trajectory", "residual", "phase"):
            out = f"{kind}.svg"
            assert run_cli("plot", "--kind", kind, "--in", "pred.csv",
                           "--out", out) == 0
            body = (data_files / out).read_text()
            assert body.startswith("<svg") and body.rstrip().endswith("</svg>")

    def test_phase_axes_from_channels(self, data_files, hps_file):
        run_cli("fit", "--hps", hps_file, "--target", "train.csv",
                "--seed", "210", "--out", "model.json")
        run_cli("predict", "--model", "model.json", "--steps", "50",
                "--out", "pred.csv")
        assert run_cli("plot", "--kind", "phase", "--in", "pred.csv",
                       "--out", "phase.svg") == 0

    def test_residual_requires_truth_columns(self, data_files, hps_file):
        run_cli("fit", "--hps", hps_file, "--target", "train.csv",
                "--seed", "210", "--out", "model.json")
        run_cli("predict", "--model", "model.json", "--steps", "10",
                "--out", "pred.csv")
        assert run_cli("plot", "--kind", "residual", "--in", "pred.csv",
                       "--out", "r.svg") == 2

    def test_byte_identical(self, data_files, hps_file):
        run_cli("fit", "--hps", hps_file, "--target", "train.csv",
                "--feedback", "--seed", "210", "--out", "model.json")
        run_cli("test", "--model", "model.json", "--target", "test.csv",
                "--out", "s.json", "--pred-out", "pred.csv")
        run_cli("plot", "--kind", "phase", "--in", "pred.csv", "--out", "p.svg")
        first = (data_files / "p.svg").read_bytes()
        run_cli("plot", "--kind", "phase", "--in", "pred.csv", "--out", "p.svg")
        assert (data_files / "p.svg").read_bytes() == first


BOUNDS_TOML = """
log_connectivity = [-1.5, -0.2]
spectral_radius = [0.7, 1.3]
n_nodes = [30, 33]
log_regularization = [-2, 1]
leaking_rate = [0, 1]
bias = [0, 1]
"""


class TestOptimize:
    @pytest.fixture
    def bounds_file(self, workdir):
        path = workdir / "bounds.toml"
        path.write_text(BOUNDS_TOML)
        return str(path)

    def test_budget_and_outputs(self, data_files, bounds_file):
        rc = run_cli(
            "optimize", "--bounds", bounds_file, "--target", "train.csv",
            "--n-trust-regions", "2", "--max-evals", "16",
            "--initial-samples", "5", "--seed", "210", "--n-jobs", "1",
            "--out", "best.json", "--trial-log", "trial.csv",
        )
        assert rc == 0
        doc = json.loads((data_files / "best.json").read_text())
        assert doc["n_evals"] <= 16
        trials = read_trial_log("trial.csv")
        assert len(trials) == doc["n_evals"]
        best = min(t.score for t in trials)
        assert doc["score"] == best

    def test_resume_continues_from_log(self, data_files, bounds_file):
        run_cli("optimize", "--bounds", bounds_file, "--target", "train.csv",
                "--n-trust-regions", "2", "--max-evals", "12",
                "--initial-samples", "5", "--seed", "210", "--n-jobs", "1",
                "--out", "best.json", "--trial-log", "trial.csv")
        first = read_trial_log("trial.csv")
        rc = run_cli("optimize", "--bounds", bounds_file, "--target", "train.csv",
                     "--n-trust-regions", "2", "--max-evals", "20",
                     "--initial-samples", "5", "--seed", "210", "--n-jobs", "1",
                     "--resume", "trial.csv",
                     "--out", "best2.json", "--trial-log", "trial2.csv")
        assert rc == 0
        resumed = read_trial_log("trial2.csv")
        assert len(resumed) == 20
        for a, b in zip(first, resumed):
            assert a.score == b.score
        doc = json.loads((data_files / "best2.json").read_text())
        assert doc["score"] <= min(t.score for t in first)

    def test_all_diverged_exit_code(self, data_files, workdir):
        # identity-activation reservoirs beyond the stability edge always diverge
        bounds = workdir / "explode.toml"
        bounds.write_text("""
log_connectivity = [-0.5, -0.2]
spectral_radius = [30, 50]
n_nodes = [20, 23]
log_regularization = [-2, 1]
leaking_rate = [0.9, 1]
bias = [0, 1]
""")
        rc = run_cli(
            "optimize", "--bounds", str(bounds), "--target", "train.csv",
            "--n-trust-regions", "2", "--max-evals", "10",
            "--initial-samples", "5", "--seed", "210", "--n-jobs", "1",
            "--feedback", "--activation-mix", "identity=1",
            "--out", "best.json", "--trial-log", "trial.csv",
        )
        assert rc == 3
        assert len(read_trial_log("trial.csv")) == 10  # log still written


class TestHeatmapCommand:
    def test_matrix_and_svg(self, workdir, hps_file):
        rc = run_cli(
            "heatmap", "--hps", hps_file, "--family", "sin", "--mode", "pure",
            "--amps", "0.3,0.5", "--freqs", "0.3,0.85", "--steps", "1200",
            "--n-jobs", "1", "--out", "hm.csv", "--svg", "hm.svg",
        )
        assert rc == 0
        lines = (workdir / "hm.csv").read_text().strip().splitlines()
        assert lines[0] == "amplitude,f_0.3,f_0.85"
        assert "masked" in lines[2]
        assert (workdir / "hm.svg").read_text().startswith("<svg")
        meta = json.loads((workdir / "hm.json").read_text())
        assert meta["masked_cells"] >= 1


class TestConfigFile:
    def test_config_with_flag_override(self, workdir):
        cfg = workdir / "run.toml"
        cfg.write_text("""
["generate-data"]
steps = 200
force = "sincos"
amp = 0.4
freq = 0.5
out = "cfg.csv"
""")
        assert run_cli("generate-data", "--config", str(cfg)) == 0
        assert len(read_series_csv("cfg.csv")["t"]) == 201
        assert run_cli("generate-data", "--config", str(cfg),
                       "--steps", "100", "--out", "cfg2.csv") == 0
        assert len(read_series_csv("cfg2.csv")["t"]) == 101

    def test_activation_function_table(self, data_files, hps_file, workdir):
        cfg = workdir / "run.toml"
        cfg.write_text("""
[fit]
activation_function = {tanh = 0.5, sin = 0.5}
""")
        assert run_cli("fit", "--config", str(cfg), "--hps", hps_file,
                       "--target", "train.csv", "--seed", "1",
                       "--out", "m.json") == 0
        doc = json.loads((workdir / "m.json").read_text())
        assert doc["activation_mix"] == {"tanh": 0.5, "sin": 0.5}


class TestEntryPoint:
    def test_installed_script(self):
        proc = subprocess.run(
            [sys.executable, "-m", "resonant.cli", "--help"],
            capture_output=True, text=True,
            env={**os.environ, "PYTHONWARNINGS": "ignore"},
        )
        assert proc.returncode == 0
        assert "generate-data" in proc.stdout
