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

from dataclasses import dataclass
from typing import List

import numpy as np
import scipy.sparse as sp

from norad.errors import ConsistencyError
from norad.graph.store import canonical_edges


@dataclass
class NormalizedAdjacency:
    """
    Symmetric GCN operator ``Ã = D̃^{-1/2} (A + I) D̃^{-1/2}`` over the training edges.

    Attributes:
        n (int): number of nodes.
        matrix (sp.csr_matrix): the ``n × n`` sparse operator.
    """
    n: int
    matrix: sp.csr_matrix

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Dense product ``Ã · x``."""
        return np.asarray(self.matrix @ x, dtype=np.float64)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()


def _validated(edges, n: int) -> np.ndarray:
    edges = canonical_edges(edges)
    if edges.size > 0 and (edges.min() < 0 or edges.max() >= n):
        raise ConsistencyError(f"Edge endpoints must lie in [0, {n})")
    return edges


def adjacency_matrix(edges, n: int) -> sp.csr_matrix:
    """Symmetric binary adjacency (no self-loops) as a CSR matrix."""
    edges = _validated(edges, n)
    rows = np.concatenate([edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 1], edges[:, 0]])
    data = np.ones(rows.shape[0], dtype=np.float64)
    return sp.csr_matrix((data, (rows, cols)), shape=(n, n))


def normalized_adjacency(edges, n: int) -> NormalizedAdjacency:
    """
    Build the self-looped, symmetrically normalized adjacency of the encoder. Entry ``(i, j)``
    is ``1 / sqrt(d̃_i d̃_j)`` with ``d̃`` the degree plus one, which makes the operator exactly
    symmetric.
    """
    edges = _validated(edges, n)
    degrees = np.bincount(edges.reshape(-1), minlength=n).astype(np.float64) + 1.0
    loops = np.arange(n)
    rows = np.concatenate([edges[:, 0], edges[:, 1], loops])
    cols = np.concatenate([edges[:, 1], edges[:, 0], loops])
    values = 1.0 / np.sqrt(degrees[rows] * degrees[cols])
    matrix = sp.csr_matrix((values, (rows, cols)), shape=(n, n))
    matrix.sort_indices()
    return NormalizedAdjacency(n, matrix)


def isolated_nodes(edges, n: int) -> List[int]:
    """Nodes without incident (training) edges, in ascending order."""
    edges = _validated(edges, n)
    degrees = np.bincount(edges.reshape(-1), minlength=n)
    return [int(i) for i in np.flatnonzero(degrees == 0)]
