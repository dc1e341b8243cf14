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

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Union

import numpy as np

from norad.autodiff import Parameter, Tensor, clip, constant, l2_normalize_rows, matmul, \
    scale, sigmoid
from norad.errors import DimensionError
from norad.graph.adjacency import NormalizedAdjacency
from norad.model.prior import ETA_BOUNDS, SIGMA_BOUNDS, VariationalParams


LOGGER = logging.getLogger('norad.model.encoder')

HEADS = ("eta", "mu", "log_sigma")
LOG_SIGMA_BOUNDS = (math.log(SIGMA_BOUNDS[0]), math.log(SIGMA_BOUNDS[1]))


def glorot_uniform(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    limit = math.sqrt(6.0 / (rows + cols))
    return rng.uniform(-limit, limit, size=(rows, cols))


@dataclass
class GcnEncoderParams:
    """
    Weights of the three encoder heads. Every head ``h`` has a self weight ``W_h`` and a
    neighbourhood weight ``V_h``, both ``D × K``.
    """
    weights: Dict[str, Parameter]
    l2_normalize: bool = False

    @classmethod
    def initialize(
            cls,
            num_attributes: int,
            k: int,
            rng: np.random.Generator,
            l2_normalize: bool = False) -> "GcnEncoderParams":
        weights = {}
        for head in HEADS:
            for kind in ("W", "V"):
                name = f"encoder.{head}.{kind}"
                weights[name] = Parameter(name, glorot_uniform(rng, num_attributes, k))
        return cls(weights=weights, l2_normalize=l2_normalize)

    @classmethod
    def zeros(cls, num_attributes: int, k: int) -> "GcnEncoderParams":
        weights = {
            f"encoder.{head}.{kind}": Parameter(
                f"encoder.{head}.{kind}", np.zeros((num_attributes, k)))
            for head in HEADS for kind in ("W", "V")}
        return cls(weights=weights)

    def parameters(self) -> List[Parameter]:
        return list(self.weights.values())

    def head(self, name: str):
        return self.weights[f"encoder.{name}.W"], self.weights[f"encoder.{name}.V"]


class GcnEncoder:
    """
    One-layer GCN encoder ``φ: (X, Ã) → (η, μ, σ)``.

    The propagated attributes ``Ã·X`` do not depend on the weights, so they are computed once
    when the encoder is built and reused at every forward pass.

    Args:
        adjacency (NormalizedAdjacency): symmetric-normalized adjacency with self-loops.
        features (np.ndarray): ``n × D`` binary attribute matrix.
        params (GcnEncoderParams): head weights.
    """
    def __init__(
            self,
            adjacency: NormalizedAdjacency,
            features: np.ndarray,
            params: GcnEncoderParams):
        if features.shape[0] != adjacency.n:
            raise DimensionError(
                f"Attribute matrix has {features.shape[0]} rows, adjacency has {adjacency.n}")
        self.params = params
        self.features = constant(np.asarray(features, dtype=np.float64))
        self.propagated = constant(adjacency.apply(np.asarray(features, dtype=np.float64)))
        LOGGER.debug(f"Encoder ready: {adjacency.n} nodes, {features.shape[1]} attributes")

    def pre_activation(self, head: str) -> Tensor:
        weight, neighbourhood_weight = self.params.head(head)
        hidden = matmul(self.features, weight) + matmul(self.propagated, neighbourhood_weight)
        if self.params.l2_normalize:
            hidden = l2_normalize_rows(hidden)
        return hidden

    def encode(self) -> VariationalParams:
        eta = clip(sigmoid(self.pre_activation("eta")), *ETA_BOUNDS)
        mu = self.pre_activation("mu")
        log_sigma = clip(scale(self.pre_activation("log_sigma"), 0.5), *LOG_SIGMA_BOUNDS)
        return VariationalParams(eta=eta, mu=mu, log_sigma=log_sigma)


def encode(
        adjacency: NormalizedAdjacency,
        features: np.ndarray,
        params: GcnEncoderParams) -> VariationalParams:
    return GcnEncoder(adjacency, features, params).encode()


ArrayOrTensor = Union[np.ndarray, Tensor]


def _values(x: ArrayOrTensor) -> np.ndarray:
    return x.data if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64)


def deterministic_representation(eta: ArrayOrTensor, mu: ArrayOrTensor) -> np.ndarray:
    """
    Thresholded representation ``z°``: ``μ`` where ``η > 0.5`` (strictly), zero elsewhere.
    """
    eta, mu = _values(eta), _values(mu)
    if eta.shape != mu.shape:
        raise DimensionError(f"eta {eta.shape} and mu {mu.shape} differ in shape")
    return np.where(eta > 0.5, mu, 0.0)


def soft_representation(eta: ArrayOrTensor, mu: ArrayOrTensor) -> np.ndarray:
    """Expected representation ``η ⊙ μ``."""
    eta, mu = _values(eta), _values(mu)
    if eta.shape != mu.shape:
        raise DimensionError(f"eta {eta.shape} and mu {mu.shape} differ in shape")
    return eta * mu
