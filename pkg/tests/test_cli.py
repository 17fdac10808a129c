"""Command-line surface: artifacts, exit codes, and error reporting."""
from __future__ import annotations

import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from conftest import regression_arrays
from djinn.baselines import random_dense_init
from djinn.cli import main
from djinn.ensemble import load_ensemble
from djinn.mapping import Architecture
from djinn.net import network_from_initialized, save_model


@pytest.fixture()
def regression_csv(tmp_path):
    x, y = regression_arrays()
    path = tmp_path / "surface.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i}" for i in range(x.shape[1])] + ["target"])
        for row, value in zip(x, y[:, 0]):
            writer.writerow([*row, value])
    return path


def train_args(csv_path, out_dir, *extra):
    return [
        "train", "--data", str(csv_path), "--task", "regression",
        "--target", "target", "--trees", "3", "--max-depth", "3",
        "--epochs", "3", "--batch", "16", "--perms", "2",
        "--out", str(out_dir), *extra,
    ]


class TestTrain:
    def test_exit_code_and_artifacts(self, regression_csv, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(train_args(regression_csv, out)) == 0
        ensemble = load_ensemble(out / "ensemble.json")
        assert len(ensemble.members) == 3
        with open(out / "report.json") as fh:
            payload = json.load(fh)
        assert payload["scheme"] == "djinn"
        metrics = payload["report"]["metrics"]
        assert set(metrics) == {"mse", "mae", "ev"}
        assert all(len(m["raw"]) == 2 for m in metrics.values())
        header = capsys.readouterr().out.splitlines()[0]
        assert "model" in header and "mse" in header

    def test_cost_history_has_scaled_column(self, regression_csv, tmp_path):
        out = tmp_path / "run"
        main(train_args(regression_csv, out))
        with open(out / "cost_history_djinn.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["epoch", "cost", "scaled_mse"]
        assert len(rows) == 4
        span_free = [float(r[1]) for r in rows[1:]]
        scaled = [float(r[2]) for r in rows[1:]]
        assert all(s <= c for s, c in zip(scaled, span_free))

    def test_deterministic_report(self, regression_csv, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(train_args(regression_csv, out_a))
        main(train_args(regression_csv, out_b))
        assert (out_a / "report.json").read_bytes() == (out_b / "report.json").read_bytes()

    def test_subsample_flag(self, regression_csv, tmp_path):
        out = tmp_path / "run"
        assert main(train_args(regression_csv, out, "--subsample", "40")) == 0
        assert (out / "report.json").exists()

    def test_alternate_scheme_names_cost_file(self, regression_csv, tmp_path):
        out = tmp_path / "run"
        code = main(train_args(regression_csv, out, "--scheme", "random_dense"))
        assert code == 0
        assert (out / "cost_history_random_dense.csv").exists()


class TestCompare:
    def test_all_schemes_reported(self, regression_csv, tmp_path, capsys):
        out = tmp_path / "cmp"
        args = [
            "compare", "--data", str(regression_csv), "--task", "regression",
            "--target", "target", "--trees", "2", "--max-depth", "3",
            "--epochs", "3", "--batch", "16", "--perms", "2", "--out", str(out),
        ]
        assert main(args) == 0
        with open(out / "report.json") as fh:
            payload = json.load(fh)
        assert payload["reference"] == "djinn"
        assert set(payload["schemes"]) == {"djinn", "random_dense", "random_sparse"}
        assert payload["schemes"]["djinn"]["p_values"]["mse"] == 1.0
        for scheme in payload["schemes"]:
            assert (out / f"cost_history_{scheme}.csv").exists()
        stdout = capsys.readouterr().out
        assert "random_sparse" in stdout


class TestSweepTrees:
    def test_csv_and_stdout(self, regression_csv, tmp_path, capsys):
        out = tmp_path / "sweep"
        args = [
            "sweep-trees", "--data", str(regression_csv), "--task", "regression",
            "--target", "target", "--max-depth", "3", "--epochs", "3",
            "--batch", "16", "--perms", "2", "--counts", "1,3",
            "--out", str(out),
        ]
        assert main(args) == 0
        with open(out / "sweep.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 5
        stdout = capsys.readouterr().out
        assert stdout.splitlines()[0] == "n_trees  mean_normalized_mse"
        assert "1.0000" in stdout

    def test_rejects_classification_task(self, regression_csv, tmp_path, capsys):
        args = [
            "sweep-trees", "--data", str(regression_csv), "--task",
            "classification", "--target", "target", "--out", str(tmp_path / "x"),
        ]
        assert main(args) == 1
        assert "error: sweep-trees runs on regression" in capsys.readouterr().err


class TestBayesopt:
    def test_artifacts_and_budget(self, regression_csv, tmp_path):
        out = tmp_path / "bo"
        args = [
            "bayesopt", "--data", str(regression_csv), "--task", "regression",
            "--target", "target", "--trees", "2", "--max-depth", "3",
            "--epochs", "3", "--batch", "16", "--perms", "2",
            "--budget", "12", "--out", str(out),
        ]
        assert main(args) == 0
        with open(out / "trials.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 13
        with open(out / "best_architecture.json") as fh:
            best = json.load(fh)
        assert best["n_inputs"] == 4
        assert best["n_outputs"] == 1
        assert len(best["hidden_widths"]) >= 1
        with open(out / "report.json") as fh:
            payload = json.load(fh)
        assert payload["n_trials"] == 12
        assert payload["best_widths"] == best["hidden_widths"]
        assert set(payload["schemes"]) == {"djinn", "bayesopt"}


class TestLogicDemo:
    def test_dot_files_and_truth_tables(self, tmp_path, capsys):
        out = tmp_path / "logic"
        assert main(["logic-demo", "--out", str(out), "--epochs", "60"]) == 0
        for gate in ("if", "or", "xor"):
            assert (out / f"{gate}_tree.dot").exists()
            assert (out / f"{gate}_network.dot").exists()
        stdout = capsys.readouterr().out
        assert "XOR gate:" in stdout
        assert "(0, 0) ->" in stdout
        assert "[truth 1]" in stdout


class TestExportDot:
    @pytest.fixture()
    def model_path(self, tmp_path):
        init = random_dense_init(Architecture(3, (4,), 2), rng_seed=0)
        path = tmp_path / "model.json"
        save_model(path, network_from_initialized(init), "regression")
        return path, init

    def test_stdout_edges_match_nonzeros(self, model_path, capsys):
        path, init = model_path
        assert main(["export-dot", str(path)]) == 0
        dot = capsys.readouterr().out
        expected = sum(int(np.count_nonzero(w)) for w in init.weights)
        assert dot.count("->") == expected

    def test_out_flag_writes_file(self, model_path, tmp_path):
        path, _ = model_path
        target = tmp_path / "net.dot"
        assert main(["export-dot", str(path), "--out", str(target)]) == 0
        assert target.read_text().startswith("digraph")


class TestErrorHandling:
    def test_missing_data_file(self, tmp_path, capsys):
        out = tmp_path / "never"
        args = [
            "train", "--data", str(tmp_path / "absent.csv"), "--task",
            "regression", "--target", "target", "--out", str(out),
        ]
        assert main(args) == 1
        assert capsys.readouterr().err.startswith("error:")
        assert not out.exists()

    def test_missing_required_arguments(self, tmp_path, capsys):
        assert main(["train", "--out", str(tmp_path / "x")]) == 1
        err = capsys.readouterr().err
        assert "error:" in err
        assert "--data, --task and --target" in err

    def test_module_help_smoke(self):
        result = subprocess.run(
            [sys.executable, "-m", "djinn.cli", "--help"],
            capture_output=True, text=True, cwd=str(Path(__file__).parent.parent),
        )
        assert result.returncode == 0
        assert "train" in result.stdout
        assert "bayesopt" in result.stdout
