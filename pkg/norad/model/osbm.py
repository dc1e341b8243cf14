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
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Tuple, Union

import numpy as np
import scipy.sparse as sp

from norad.autodiff import Parameter, Tensor, absolute, constant, hadamard, matmul, \
    reduce_sum, scale, softplus, transpose
from norad.autodiff.ops import Sigmoid, Softplus
from norad.config import arithmetic_threads
from norad.errors import ConfigError, DimensionError


LOGGER = logging.getLogger('norad.model.osbm')

PARAM_NAME = "blockmodel.B"


@dataclass
class BlockModel:
    """
    Overlapping stochastic block matrix ``B`` (``K × K``).

    In the ``identity_b`` ablation the matrix is fixed to the identity and is not trained.
    """
    b: Parameter

    @classmethod
    def initialize(cls, k: int, fixed_identity: bool = False) -> "BlockModel":
        return cls(Parameter(PARAM_NAME, np.eye(k), trainable=not fixed_identity))

    @property
    def k(self) -> int:
        return self.b.shape[0]


def positive_weight(setting: Union[str, float], n: int, num_edges: int,
                    exclude_diagonal: bool = True) -> float:
    """
    Weight of the positive pairs in the edge log-likelihood.

    ``"auto"`` gives the ratio between the included non-edge pairs and the edge pairs (ordered
    pairs in both cases), ``"none"`` disables the weighting.
    """
    if setting == "none":
        return 1.0
    if setting == "auto":
        positives = 2 * num_edges
        if positives == 0:
            return 1.0
        included = n * n - (n if exclude_diagonal else 0)
        return max(included - positives, 1) / positives
    weight = float(setting)
    if weight <= 0:
        raise ConfigError(f"pos_weight must be positive, got {weight}")
    return weight


def edge_logits(z: Tensor, b: Tensor) -> Tensor:
    """Logits ``L = Z B Zᵀ`` of all the ordered pairs."""
    if len(z.shape) != 2 or b.shape != (z.shape[1], z.shape[1]):
        raise DimensionError(f"Incompatible shapes Z {z.shape} and B {b.shape}")
    return matmul(matmul(z, b), transpose(z))


def _pair_weights(adjacency: np.ndarray, pos_weight: float, exclude_diagonal: bool,
                  row_offset: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    positive = pos_weight * adjacency
    negative = 1.0 - adjacency
    if exclude_diagonal:
        rows = np.arange(adjacency.shape[0])
        cols = rows + row_offset
        keep = cols < adjacency.shape[1]
        positive[rows[keep], cols[keep]] = 0.0
        negative[rows[keep], cols[keep]] = 0.0
    return positive, negative


def adjacency_log_likelihood(
        adjacency: np.ndarray,
        logits: Tensor,
        pos_weight: float = 1.0,
        exclude_diagonal: bool = True) -> Tensor:
    """
    Weighted Bernoulli log-likelihood of a dense adjacency given the edge logits:
    ``Σ pos_weight·A·log σ(L) + (1−A)·log(1−σ(L))`` over the ordered pairs.

    The log-probabilities are computed as ``−softplus(∓L)``.
    """
    adjacency = np.asarray(adjacency, dtype=np.float64)
    if adjacency.shape != logits.shape:
        raise DimensionError(f"Adjacency {adjacency.shape} and logits {logits.shape} differ")
    positive, negative = _pair_weights(adjacency.copy(), pos_weight, exclude_diagonal)
    penalty = hadamard(constant(positive), softplus(scale(logits, -1.0))) + \
        hadamard(constant(negative), softplus(logits))
    return scale(reduce_sum(penalty), -1.0)


class BlockedEdgeLikelihood:
    """
    Fused computation of the same quantity as :func:`adjacency_log_likelihood` applied to
    :func:`edge_logits`, working on blocks of rows of ``Z B Zᵀ``.

    Only one ``block_rows × n`` slab of logits exists at a time, both in the forward pass and
    in the backward pass (which recomputes the slabs). Partial results are reduced in block
    order, so the result does not depend on the number of threads.
    """
    def __init__(
            self,
            adjacency: sp.csr_matrix,
            pos_weight: float = 1.0,
            exclude_diagonal: bool = True,
            block_rows: int = 512):
        self.adjacency = sp.csr_matrix(adjacency)
        self.n = self.adjacency.shape[0]
        self.pos_weight = pos_weight
        self.exclude_diagonal = exclude_diagonal
        self.block_rows = block_rows
        self.starts = list(range(0, self.n, block_rows))

    def _weights(self, start: int) -> Tuple[np.ndarray, np.ndarray]:
        stop = min(start + self.block_rows, self.n)
        dense = self.adjacency[start:stop].toarray()
        return _pair_weights(dense, self.pos_weight, self.exclude_diagonal, row_offset=start)

    def _map(self, fn, starts: List[int]):
        threads = arithmetic_threads()
        if threads == 1 or len(starts) == 1:
            return [fn(start) for start in starts]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, starts))

    def value(self, z: np.ndarray, b: np.ndarray) -> float:
        right = b @ z.T

        def block(start):
            positive, negative = self._weights(start)
            logits = z[start:start + self.block_rows] @ right
            penalty = positive * Softplus.forward(-logits) + negative * Softplus.forward(logits)
            return -float(np.sum(penalty))

        return float(sum(self._map(block, self.starts)))

    def gradients(self, z: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        right = b @ z.T
        z_bt = z @ b.T

        def block(start):
            rows = z[start:start + self.block_rows]
            positive, negative = self._weights(start)
            logits = rows @ right
            g = positive * Sigmoid.forward(-logits) - negative * Sigmoid.forward(logits)
            return g @ z_bt, g.T @ (rows @ b), rows.T @ g @ z

        grad_z = np.zeros_like(z)
        grad_b = np.zeros_like(b)
        partials = self._map(block, self.starts)
        for start, (own_rows, all_rows, block_b) in zip(self.starts, partials):
            grad_z[start:start + own_rows.shape[0]] += own_rows
            grad_z += all_rows
            grad_b += block_b
        return grad_z, grad_b

    def __call__(self, z: Tensor, b: Tensor) -> Tensor:
        if z.shape[0] != self.n or b.shape != (z.shape[1], z.shape[1]):
            raise DimensionError(
                f"Incompatible shapes Z {z.shape}, B {b.shape} for {self.n} nodes")
        z_data, b_data = z.data, b.data

        def backward_fn(g):
            grad_z, grad_b = self.gradients(z_data, b_data)
            factor = float(g.reshape(-1)[0])
            return factor * grad_z, factor * grad_b

        return Tensor.from_op(
            np.array(self.value(z_data, b_data)), "edge_log_likelihood", (z, b), backward_fn)


def b_penalty(b: Tensor, gamma: float) -> Tensor:
    """L1 sparsity penalty ``γ Σ |B_kl|``."""
    return scale(reduce_sum(absolute(b)), gamma)
