# Copyright 2026 FBK

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

import norad
from norad.config import TrainConfig, load_train_config
from norad.errors import CompatibilityError, ConsistencyError


LOGGER = logging.getLogger('norad.training.checkpoint')

CHECKPOINT_FORMAT_VERSION = 1
MANIFEST_FILE = "checkpoint.json"
BLOB_FILE = "params.f64"
BLOB_DTYPE = np.dtype("<f8")


@dataclass
class Checkpoint:
    """
    Parameter values and the configuration that produced them.

    Attributes:
        config (TrainConfig): resolved training configuration.
        values (Dict[str, np.ndarray]): parameter values by name.
        metadata (Dict[str, Any]): additional deterministic information (e.g. the round, the
            validation AUC, the split manifest hash).
    """
    config: TrainConfig
    values: Dict[str, np.ndarray]
    metadata: Dict[str, Any] = field(default_factory=dict)


def save_checkpoint(
        directory: str,
        config: TrainConfig,
        values: Dict[str, np.ndarray],
        metadata: Optional[Dict[str, Any]] = None) -> None:
    """
    Write ``checkpoint.json`` and ``params.f64`` (raw little-endian float64) in ``directory``.

    The manifest carries no timestamp, so two runs with the same seed produce identical
    files.
    """
    os.makedirs(directory, exist_ok=True)
    entries = []
    offset = 0
    chunks = []
    for name in sorted(values):
        value = np.ascontiguousarray(values[name], dtype=BLOB_DTYPE)
        entries.append({"name": name, "shape": list(value.shape), "offset": offset})
        offset += value.size
        chunks.append(value.reshape(-1))
    manifest = {
        "version": CHECKPOINT_FORMAT_VERSION,
        "norad_version": norad.__version__,
        "config": config.to_dict(),
        "parameters": entries,
        "metadata": metadata or {},
    }
    blob_path = os.path.join(directory, BLOB_FILE)
    manifest_path = os.path.join(directory, MANIFEST_FILE)
    # blob first, manifest last: a readable manifest implies a complete blob
    with open(blob_path + ".tmp", "wb") as f:
        f.write(np.concatenate(chunks).tobytes() if chunks else b"")
    os.replace(blob_path + ".tmp", blob_path)
    with open(manifest_path + ".tmp", "w", encoding="utf-8") as f:
        json.dump(manifest, f, sort_keys=True, indent=2)
    os.replace(manifest_path + ".tmp", manifest_path)
    LOGGER.debug(f"Checkpoint with {len(entries)} parameters written to {directory}")


def load_checkpoint(directory: str) -> Checkpoint:
    """
    Read a checkpoint written by :func:`save_checkpoint`.

    Raises:
        CompatibilityError: if the format version differs from the supported one.
        ConsistencyError: if the blob does not match the manifest.
    """
    with open(os.path.join(directory, MANIFEST_FILE), "r", encoding="utf-8") as f:
        manifest = json.load(f)
    version = manifest.get("version")
    if version != CHECKPOINT_FORMAT_VERSION:
        raise CompatibilityError(
            f"Checkpoint format version {version} is not supported "
            f"(expected {CHECKPOINT_FORMAT_VERSION})")
    blob = np.fromfile(os.path.join(directory, BLOB_FILE), dtype=BLOB_DTYPE)
    values = {}
    for entry in manifest["parameters"]:
        shape = tuple(entry["shape"])
        start = entry["offset"]
        stop = start + int(np.prod(shape))
        if stop > blob.size:
            raise ConsistencyError(
                f"Parameter {entry['name']} exceeds the blob ({stop} > {blob.size} values)")
        values[entry["name"]] = blob[start:stop].reshape(shape).astype(np.float64)
    config = load_train_config(overrides=manifest["config"])
    return Checkpoint(config=config, values=values, metadata=manifest.get("metadata", {}))
