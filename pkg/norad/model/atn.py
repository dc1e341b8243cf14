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
from typing import List, Tuple

import numpy as np

from norad.autodiff import Parameter, Tensor, backward, clip, constant, hadamard, log, \
    matmul, reduce_sum, relu, scale, shift, sigmoid, transpose
from norad.autodiff.ops import Sigmoid
from norad.errors import DimensionError
from norad.model.encoder import glorot_uniform


LOGGER = logging.getLogger('norad.model.atn')

LAMBDA_BOUNDS = (1e-6, 1.0 - 1e-6)


@dataclass
class AtnParams:
    """
    Attribute decoder weights.

    Attributes:
        t (Parameter): ``K × d'`` projection of the latent representation.
        u (Parameter): ``d' × D`` attribute embeddings.
        w_q (Parameter): ``d' × d''`` query weights.
        w_k (Parameter): ``d' × d''`` key weights.
    """
    t: Parameter
    u: Parameter
    w_q: Parameter
    w_k: Parameter

    @classmethod
    def initialize(
            cls,
            k: int,
            d_prime: int,
            d_dprime: int,
            num_attributes: int,
            rng: np.random.Generator,
            trainable: bool = True) -> "AtnParams":
        if d_prime >= num_attributes:
            LOGGER.warning(
                f"Attribute embeddings (d'={d_prime}) do not compress the {num_attributes} "
                f"attributes")
        return cls(
            t=Parameter("atn.T", glorot_uniform(rng, k, d_prime), trainable),
            u=Parameter("atn.U", glorot_uniform(rng, d_prime, num_attributes), trainable),
            w_q=Parameter("atn.W_q", glorot_uniform(rng, d_prime, d_dprime), trainable),
            w_k=Parameter("atn.W_k", glorot_uniform(rng, d_prime, d_dprime), trainable))

    def parameters(self) -> List[Parameter]:
        return [self.t, self.u, self.w_q, self.w_k]

    def frozen(self) -> "AtnParams":
        """Copy of the weights that takes no part in gradient sweeps."""
        return AtnParams(*(Parameter(p.name, p.data, trainable=False) for p in self.parameters()))

    @property
    def k(self) -> int:
        return self.t.shape[0]

    @property
    def d_dprime(self) -> int:
        return self.w_q.shape[1]

    @property
    def num_attributes(self) -> int:
        return self.u.shape[1]


def attribute_logits(z: Tensor, params: AtnParams) -> Tensor:
    """
    Logits ``relu(Z T) · W_q W_kᵀ · U / sqrt(d'')`` for a batch of representations
    (``m × K`` → ``m × D``).
    """
    if len(z.shape) != 2 or z.shape[1] != params.k:
        raise DimensionError(f"Expected representations with {params.k} columns, got {z.shape}")
    hidden = relu(matmul(z, params.t))
    attention = matmul(params.w_q, transpose(params.w_k))
    logits = matmul(matmul(hidden, attention), params.u)
    return scale(logits, 1.0 / math.sqrt(params.d_dprime))


def attribute_probs_batch(z: Tensor, params: AtnParams) -> Tensor:
    """Clamped attribute probabilities ``Λ`` for a batch of representations."""
    return clip(sigmoid(attribute_logits(z, params)), *LAMBDA_BOUNDS)


def attribute_probs(z: np.ndarray, params: AtnParams) -> np.ndarray:
    """Clamped attribute probabilities of a single representation ``z`` (length ``K``)."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (params.k,):
        raise DimensionError(f"Expected a representation of length {params.k}, got {z.shape}")
    return attribute_probs_batch(constant(z[None, :]), params).data[0].copy()


def attribute_probs_numpy(z: np.ndarray, params: AtnParams) -> np.ndarray:
    """Tape-free version of :func:`attribute_probs_batch` for inference."""
    hidden = np.maximum(z @ params.t.data, 0.0)
    logits = hidden @ (params.w_q.data @ params.w_k.data.T) @ params.u.data
    return np.clip(Sigmoid.forward(logits / math.sqrt(params.d_dprime)), *LAMBDA_BOUNDS)


def attribute_log_likelihood_rows(features: np.ndarray, probs: Tensor) -> Tensor:
    """Per-row Bernoulli log-likelihood ``Σ_j x log λ + (1−x) log(1−λ)``."""
    features = np.asarray(features, dtype=np.float64)
    if features.shape != probs.shape:
        raise DimensionError(f"Attributes {features.shape} and probabilities {probs.shape} differ")
    present = hadamard(constant(features), log(probs))
    absent = hadamard(constant(1.0 - features), log(shift(scale(probs, -1.0), 1.0)))
    return reduce_sum(present + absent, axis=1)


def attribute_log_likelihood(features: np.ndarray, probs: Tensor) -> Tensor:
    return reduce_sum(attribute_log_likelihood_rows(features, probs))


def attribute_gradients(
        z: np.ndarray,
        features: np.ndarray,
        params: AtnParams) -> Tuple[np.ndarray, np.ndarray]:
    """
    Attribute log-likelihood of every row of ``z`` and its gradient with respect to that row.

    Rows do not interact, so the gradient of the summed log-likelihood gives all the per-row
    gradients in a single reverse sweep.

    Returns:
        Tuple[np.ndarray, np.ndarray]: log-likelihoods (``m``) and gradients (``m × K``).
    """
    rows = Parameter("rectify.z", np.asarray(z, dtype=np.float64))
    per_row = attribute_log_likelihood_rows(features, attribute_probs_batch(rows, params.frozen()))
    backward(reduce_sum(per_row), [rows])
    return per_row.data.copy(), rows.grad.copy()


def rectification_gradient(z: np.ndarray, x: np.ndarray, params: AtnParams) -> np.ndarray:
    """Gradient of ``log p(x | z)`` with respect to a single representation ``z``."""
    z = np.asarray(z, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if z.shape != (params.k,) or x.shape != (params.num_attributes,):
        raise DimensionError(
            f"Expected z of length {params.k} and x of length {params.num_attributes}, "
            f"got {z.shape} and {x.shape}")
    _, grads = attribute_gradients(z[None, :], x[None, :], params)
    return grads[0]
