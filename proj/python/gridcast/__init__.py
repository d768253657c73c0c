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

"""Python bindings for the gridcast occupancy forecasting library."""

import json
import os

from ._core import (
    FormatError,
    ablation_names,
    auc_pr,
    iou,
    load_grd,
    render,
    save_grd,
    soft_iou,
)
from . import _core

__all__ = [
    "FormatError",
    "ablation_names",
    "auc_pr",
    "evaluate",
    "gen_data",
    "iou",
    "load_grd",
    "render",
    "save_grd",
    "soft_iou",
    "train",
]


def _config_text(config):
    return "" if config is None else json.dumps(config)


def gen_data(out, seed=42, config=None, workers=1):
    """Generate a dataset under `out` and return its manifest.

    `config` takes the same sections as a ``--config`` file; only
    ``dataset`` is used here.
    """
    return json.loads(_core._gen_data(os.fspath(out), seed, _config_text(config), workers))


def train(data, out, config=None, ablation="full"):
    """Train on the dataset at `data`; returns the per-epoch loss log."""
    return json.loads(_core._train(os.fspath(data), os.fspath(out), _config_text(config), ablation))


def evaluate(checkpoint, data, out, include_baselines=False, noisy_semantics=False, workers=1):
    """Score a checkpoint on the validation split; returns the report."""
    text = _core._evaluate(
        os.fspath(checkpoint), os.fspath(data), os.fspath(out), include_baselines, noisy_semantics, workers
    )
    return json.loads(text)
