# Copyright 2026 The GridCast Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import os
import subprocess

import numpy as np
import pytest

import gridcast

TINY = {
    "dataset": {"n_train": 2, "n_val": 1},
    "model": {"base_channels": 2, "latent_dim": 4, "lstm_layers": 1, "gru_layers": 1},
    "train": {"epochs": 2, "batch_size": 2},
}


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("data")
    manifest = gridcast.gen_data(root, seed=3, config=TINY)
    return root, manifest


def test_metrics_match_numpy():
    rng = np.random.default_rng(0)
    pred = rng.random((16, 16), dtype=np.float32)
    gt = (rng.random((16, 16)) < 0.3).astype(np.float32)
    p = pred.astype(np.float64)
    g = gt.astype(np.float64)
    inter = (p * g).sum()
    union = (p + g - p * g).sum()
    assert gridcast.soft_iou(pred, gt) == pytest.approx(inter / union, abs=1e-9)
    hard = pred >= 0.5
    on = gt > 0.5
    assert gridcast.iou(pred, gt) == pytest.approx((hard & on).sum() / (hard | on).sum(), abs=1e-9)
    assert gridcast.auc_pr(gt, gt) == pytest.approx(1.0)
    assert gridcast.auc_pr(pred, np.zeros_like(gt)) is None
    with pytest.raises(ValueError):
        gridcast.soft_iou(pred, gt[:8])


def test_grid_round_trip(tmp_path):
    a = np.arange(2 * 3 * 4 * 4, dtype=np.float32).reshape(2, 3, 4, 4) / 100
    gridcast.save_grd(tmp_path / "a.grd", a)
    np.testing.assert_array_equal(gridcast.load_grd(tmp_path / "a.grd"), a)
    (tmp_path / "bad.grd").write_bytes(b"GRD1")
    with pytest.raises(gridcast.FormatError):
        gridcast.load_grd(tmp_path / "bad.grd")


def test_gen_train_eval(dataset, tmp_path):
    root, manifest = dataset
    assert len(manifest["train"]) == 2
    assert len(manifest["val"]) == 1
    targets = gridcast.load_grd(root / manifest["val"][0]["dir"] / "targets.grd")
    assert targets.shape == (6, 1, 64, 64)

    log = gridcast.train(root, tmp_path / "run", config=TINY, ablation="dogm+sem")
    assert [e["epoch"] for e in log] == [1, 2]
    report = gridcast.evaluate(tmp_path / "run" / "model.ckpt", root, tmp_path / "eval", include_baselines=True)
    assert set(report["systems"]) == {"model", "persistence", "const_velocity"}
    assert len(report["systems"]["model"]["per_step"]) == 5
    assert (tmp_path / "eval" / "retention.csv").exists()

    with pytest.raises(ValueError, match="dogm\\+radar"):
        gridcast.train(root, tmp_path / "bad", config=TINY, ablation="dogm+radar")


def test_render(dataset, tmp_path):
    root, manifest = dataset
    pngs = gridcast.render(root / manifest["val"][0]["dir"] / "dogm.grd", tmp_path, scale=1)
    assert len(pngs) == 10
    assert all(p.suffix == ".png" for p in pngs)
    assert "full" in gridcast.ablation_names()


@pytest.mark.skipif("GRIDCAST_CLI" not in os.environ, reason="command line binary not provided")
def test_cli_exit_codes(tmp_path):
    cli = os.environ["GRIDCAST_CLI"]
    assert subprocess.run([cli, "--help"], capture_output=True).returncode == 0
    assert subprocess.run([cli], capture_output=True).returncode == 2
    bad = subprocess.run([cli, "train", "--data", str(tmp_path), "--ablation", "radar"], capture_output=True)
    assert bad.returncode == 2
    missing = subprocess.run([cli, "gen-data", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path / "d")],
                             capture_output=True)
    assert missing.returncode == 1
