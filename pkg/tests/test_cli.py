import json
import os
import subprocess
import sys

import numpy as np
import pytest

from kdla.cli import main
from kdla.persist import read_csv, write_dataset, write_trajectory
from kdla.systems import SnapshotDataset, Trajectory

SMALL = ["--hidden", "8", "--d", "3", "--activations", "elu,linear", "--epochs", "5"]


@pytest.fixture
def sl_data(tmp_path):
    assert main(["generate", "--system", "stuart-landau", "--out", str(tmp_path / "data")]) == 0
    return tmp_path / "data" / "dataset.json"


def test_module_entry_point_help():
    r = subprocess.run([sys.executable, "-m", "kdla", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for cmd in ("generate", "train", "evolve", "evaluate", "spectrum", "reproduce"):
        assert cmd in r.stdout


def test_usage_errors_exit_2(tmp_path):
    r = subprocess.run([sys.executable, "-m", "kdla", "train"], capture_output=True, text=True)
    assert r.returncode == 2
    assert main(["generate", "--system", "lorenz", "--out", str(tmp_path)]) == 2
    assert main(["reproduce", "nope", "--out", str(tmp_path)]) == 2
    assert main(["spectrum", "--model", str(tmp_path / "missing.json")]) == 2


def test_generate_writes_dataset_and_config(sl_data):
    side = json.loads(sl_data.read_text())
    assert side["M"] == 500 and side["n"] == 1
    cfg = json.loads((sl_data.parent / "config.json").read_text())
    assert cfg["system"] == "stuart-landau" and cfg["seed"] == 0
    h, rows = read_csv(sl_data.parent / "trajectories" / "traj_0000.csv")
    assert h == ["t", "x0"] and rows.shape == (501, 2)


def test_generate_is_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["generate", "--system", "stuart-landau", "--out", str(tmp_path / d)]) == 0
    for name in ("dataset_X_t.csv", "dataset.json", "trajectories/traj_0000.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_train_evolve_spectrum_evaluate(sl_data, tmp_path):
    out = tmp_path / "model"
    assert main(["train", "--dataset", str(sl_data), *SMALL, "--out", str(out)]) == 0
    model = out / "model.json"
    assert (out / "loss_curve.csv").exists()
    resolved = json.loads((out / "config.json").read_text())["resolved_train"]
    assert resolved["epochs"] == 5 and resolved["hidden"] == [8]

    ev = tmp_path / "ev"
    assert main(["evolve", "--model", str(model), "--x0", "0.001", "--steps", "10", "--mode", "so",
                 "--m", "1,5", "--out", str(ev)]) == 0
    assert (ev / "trajectory_so_m1.csv").exists() and (ev / "trajectory_so_m5.csv").exists()
    assert main(["evolve", "--model", str(model), "--x0", "1,2", "--steps", "3", "--out", str(ev)]) == 2

    sp = tmp_path / "sp"
    assert main(["spectrum", "--model", str(model), "--out", str(sp)]) == 0
    summary = json.loads((sp / "summary.json").read_text())
    assert summary["D"] == 4

    truth = sl_data.parent / "trajectories" / "traj_0000.csv"
    assert main(["evolve", "--model", str(model), "--x0-file", str(truth), "--steps", "500",
                 "--out", str(ev)]) == 0
    va = tmp_path / "va"
    assert main(["evaluate", "--truth", str(truth), "--pred", str(ev / "trajectory_oo.csv"),
                 "--metrics", "tracking,energy,power", "--out", str(va)]) == 0
    s = json.loads((va / "summary.json").read_text())
    assert s["tracking"]["ensemble"] == 1
    assert main(["evaluate", "--metrics", "basin", "--model", str(model), "--out", str(va)]) == 2
    assert main(["evaluate", "--metrics", "bogus", "--out", str(va)]) == 2


def test_train_dict_size_mismatch_exits_2(sl_data, tmp_path):
    assert main(["train", "--dataset", str(sl_data), *SMALL, "--dict-size", "9",
                 "--out", str(tmp_path / "m")]) == 2


def test_toml_config_and_flag_precedence(sl_data, tmp_path):
    conf = tmp_path / "c.toml"
    conf.write_text('seed = 4\n[train]\nepochs = 3\nhidden = [6]\nd = 2\nactivations = "tanh"\n')
    out = tmp_path / "m"
    assert main(["train", "--dataset", str(sl_data), "--config", str(conf), "--epochs", "2",
                 "--out", str(out)]) == 0
    cfg = json.loads((out / "config.json").read_text())
    assert cfg["seed"] == 4
    assert cfg["resolved_train"]["epochs"] == 2 and cfg["resolved_train"]["hidden"] == [6]
    bad = tmp_path / "bad.toml"
    bad.write_text("seed = = 1\n")
    assert main(["train", "--dataset", str(sl_data), "--config", str(bad), "--out", str(out)]) == 2


def test_parse_error_exit_2(tmp_path):
    (tmp_path / "ds.json").write_text('{"version": "kdla-data/1", "n": 1, "M": 2, "dt": 0.1, '
                                      '"X_t": "a.csv", "X_tdt": "a.csv"}')
    (tmp_path / "a.csv").write_text("x0\n1\nfoo\n")
    assert main(["train", "--dataset", str(tmp_path / "ds.json"), "--case", "stuart-landau",
                 "--out", str(tmp_path / "o")]) == 2


def test_divergence_exits_3(tmp_path):
    rng = np.random.default_rng(0)
    X = rng.standard_normal((2, 200)) * 1e300
    write_dataset(tmp_path / "ds", SnapshotDataset(X, 0.5 * X, 0.1, {"recipe": "duffing"}))
    with np.errstate(all="ignore"):
        for method, extra in (("node", []), ("kdla", ["--hidden", "4", "--d", "3"])):
            code = main(["train", "--dataset", str(tmp_path / "ds.json"), "--method", method,
                         "--epochs", "3", "--out", str(tmp_path / method), *extra])
            assert code == 3


def test_env_var_sets_output_root(sl_data, tmp_path, monkeypatch):
    monkeypatch.setenv("KDLA_OUTPUT_ROOT", str(tmp_path / "root"))
    assert main(["train", "--dataset", str(sl_data), *SMALL]) == 0
    assert (tmp_path / "root" / "stuart-landau" / "kdla" / "model.json").exists()


def test_evaluate_basin_on_duffing_model(tmp_path):
    rng = np.random.default_rng(0)
    X = rng.uniform(-2, 2, (2, 300))
    write_dataset(tmp_path / "ds", SnapshotDataset(X, X + 0.1 * X[::-1], 0.1, {"recipe": "duffing",
                                                                             "system": {"name": "duffing"}}))
    assert main(["train", "--dataset", str(tmp_path / "ds.json"), "--method", "node", "--epochs", "2",
                 "--hidden", "4,4", "--out", str(tmp_path / "m")]) == 0
    assert main(["evaluate", "--metrics", "basin", "--model", str(tmp_path / "m" / "model.json"),
                 "--grid", "4", "--out", str(tmp_path / "b")]) == 0
    _, rows = read_csv(tmp_path / "b" / "basin.csv")
    assert rows.shape == (16, 6)
