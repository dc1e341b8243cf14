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

import dataclasses
import hashlib
import json
import os
import zlib
from dataclasses import dataclass
from typing import Any, Dict, Optional, Union

import numpy as np
import yaml

from norad.errors import ConfigError


DECODER_MODES = ("osbm", "identity_b", "no_attr")
M_STEP_REPRESENTATIONS = ("threshold", "soft")


def read_yaml(path: str) -> Dict[str, Any]:
    with open(path, "r") as file:
        content = yaml.safe_load(file)
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise ConfigError(f"Configuration file {path} must contain a mapping")
    return content


@dataclass
class TrainConfig:
    """
    Hyper-parameters of the variational EM training.

    Attributes:
        alpha (float): weight of the attribute log-likelihood in the ELBO. Values > 1 are the
            link-prediction preset.
        gamma (float): coefficient of the L1 penalty on the blockmodel, used in the M-step.
        t_e (int): Adam iterations per E-step.
        t_m (int): Adam iterations per M-step.
        outer_rounds (int): maximum number of E/M alternations.
        learning_rate (float): Adam learning rate, shared by both phases.
        k (int): number of communities (latent dimension).
        d_prime (int): size of the community/attribute embeddings of the ATN.
        d_dprime (int): size of the attention projections of the ATN.
        temperature_start (float): initial relaxation temperature.
        temperature_floor (float): minimum relaxation temperature.
        anneal_fraction (float): fraction of the E-iterations of the whole run over which the
            temperature decays from ``temperature_start`` to ``temperature_floor``.
        seed (int): master seed, split into named streams.
        pos_weight (Union[str, float]): ``"auto"`` (sparsity re-weighting), ``"none"`` (1.0)
            or an explicit positive weight.
        exclude_diagonal (bool): whether ``i == j`` pairs are excluded from the edge
            likelihood.
        l2_normalize (bool): row L2-normalization of the encoder hidden features.
        decoder (str): one of ``osbm``, ``identity_b`` (dot-product decoder, B fixed to the
            identity) and ``no_attr`` (attribute decoder disabled, alpha forced to 0).
        m_step_representation (str): ``threshold`` uses Z° = μ ⊙ 1(η > 0.5) in the M-step,
            ``soft`` uses η ⊙ μ.
        prior_delta (float): spike probability of the prior.
        prior_u (float): slab mean of the prior.
        prior_s (float): slab standard deviation of the prior.
        convergence_tol (float): relative ELBO improvement below which training stops, once
            the temperature has reached its floor.
        convergence_window (int): number of outer rounds the improvement is measured over.
        block_rows (int): rows per block of the dense edge likelihood.
    """
    alpha: float = 1.0
    gamma: float = 0.001
    t_e: int = 10
    t_m: int = 10
    outer_rounds: int = 200
    learning_rate: float = 0.001
    k: int = 256
    d_prime: int = 128
    d_dprime: int = 64
    temperature_start: float = 1.0
    temperature_floor: float = 0.5
    anneal_fraction: float = 0.5
    seed: int = 0
    pos_weight: Union[str, float] = "auto"
    exclude_diagonal: bool = True
    l2_normalize: bool = False
    decoder: str = "osbm"
    m_step_representation: str = "threshold"
    prior_delta: float = 0.5
    prior_u: float = 0.0
    prior_s: float = 1.0
    convergence_tol: float = 1e-4
    convergence_window: int = 5
    block_rows: int = 512

    def __post_init__(self):
        if self.alpha < 0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        if self.gamma < 0:
            raise ConfigError(f"gamma must be >= 0, got {self.gamma}")
        if self.t_e < 1 or self.t_m < 1:
            raise ConfigError(f"t_e and t_m must be >= 1, got {self.t_e} and {self.t_m}")
        if self.outer_rounds < 1:
            raise ConfigError(f"outer_rounds must be >= 1, got {self.outer_rounds}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if min(self.k, self.d_prime, self.d_dprime, self.block_rows) < 1:
            raise ConfigError("k, d_prime, d_dprime and block_rows must be positive")
        if self.temperature_floor <= 0 or self.temperature_start < self.temperature_floor:
            raise ConfigError(
                f"Invalid temperatures: start {self.temperature_start}, "
                f"floor {self.temperature_floor}")
        if not 0 < self.anneal_fraction <= 1:
            raise ConfigError(f"anneal_fraction must be in (0, 1], got {self.anneal_fraction}")
        if self.decoder not in DECODER_MODES:
            raise ConfigError(f"decoder must be one of {DECODER_MODES}, got {self.decoder}")
        if self.m_step_representation not in M_STEP_REPRESENTATIONS:
            raise ConfigError(
                f"m_step_representation must be one of {M_STEP_REPRESENTATIONS}, "
                f"got {self.m_step_representation}")
        if not 0 < self.prior_delta < 1 or self.prior_s <= 0:
            raise ConfigError(
                f"Invalid prior: delta {self.prior_delta}, s {self.prior_s}")
        if isinstance(self.pos_weight, str):
            if self.pos_weight not in ("auto", "none"):
                raise ConfigError(
                    f"pos_weight must be 'auto', 'none' or a number, got {self.pos_weight}")
        elif self.pos_weight <= 0:
            raise ConfigError(f"pos_weight must be > 0, got {self.pos_weight}")

    @property
    def effective_alpha(self) -> float:
        return 0.0 if self.decoder == "no_attr" else self.alpha

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


def load_train_config(
        path: Optional[str] = None,
        overrides: Optional[Dict[str, Any]] = None) -> TrainConfig:
    """
    Build a :class:`TrainConfig` from defaults, an optional YAML/JSON file with flat keys and
    optional overrides (e.g. CLI flags), in increasing order of priority.

    Raises:
        ConfigError: if unknown keys are present or values violate the invariants.
    """
    values = {}
    if path is not None:
        values.update(read_yaml(path))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in dataclasses.fields(TrainConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"Unknown configuration keys: {unknown}")
    return TrainConfig(**values)


def config_hash(config: Union[TrainConfig, Dict[str, Any]]) -> str:
    if isinstance(config, TrainConfig):
        config = config.to_dict()
    return hashlib.sha256(
        json.dumps(config, sort_keys=True, default=str).encode("utf-8")).hexdigest()


def arithmetic_threads() -> int:
    """
    Number of threads used by the row-blocked kernels, read from ``NORAD_THREADS``.
    1 (the default) means sequential arithmetic, which is required for bit-exact
    reproducibility.
    """
    value = os.environ.get("NORAD_THREADS", "1")
    try:
        threads = int(value)
    except ValueError:
        raise ConfigError(f"NORAD_THREADS must be an integer, got {value!r}")
    return max(threads, 1)


def rng_stream(seed: int, name: str) -> np.random.Generator:
    """
    Independent random generator for the named stream (e.g. ``split``, ``init``, ``noise``,
    ``kmeans``) derived from the master seed, so that consuming one stream never perturbs
    the others.
    """
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(zlib.crc32(name.encode("utf-8")),)))
