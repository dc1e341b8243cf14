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
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from norad.errors import ConfigError, ContractError, NoradError
from norad.graph.adjacency import isolated_nodes
from norad.graph.store import AttributedGraph
from norad.model.atn import AtnParams, attribute_gradients


LOGGER = logging.getLogger('norad.rectifier')


@dataclass
class RectifyConfig:
    """
    Attributes:
        epsilon (float): step size of the gradient ascent.
        iterations (int): ascent steps per node.
        targets (Sequence[int], optional): nodes to rectify; the isolated nodes of the
            training graph when omitted.
        preserve_sparsity (bool): keep zero coordinates of the starting rows at zero.
    """
    epsilon: float = 0.001
    iterations: int = 50
    targets: Optional[Sequence[int]] = None
    preserve_sparsity: bool = False

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if self.iterations < 0:
            raise ConfigError(f"iterations must be >= 0, got {self.iterations}")


@dataclass
class RectifyResult:
    """
    Attributes:
        z (np.ndarray): rectified representations; rows of non-target and failed nodes are
            the original ones.
        trace (Dict[int, List[float]]): attribute log-likelihood of every target node before
            each step and after the last one.
        failed (List[int]): target nodes whose log-likelihood became non-finite.
    """
    z: np.ndarray
    targets: List[int]
    trace: Dict[int, List[float]] = field(default_factory=dict)
    failed: List[int] = field(default_factory=list)

    def log_likelihood_before(self) -> Dict[int, float]:
        return {node: values[0] for node, values in self.trace.items()}

    def log_likelihood_after(self) -> Dict[int, float]:
        return {node: values[-1] for node, values in self.trace.items() if node not in self.failed}


def _row_gradients(
        z: np.ndarray, features: np.ndarray, atn: AtnParams) -> Tuple[np.ndarray, np.ndarray]:
    """Batched log-likelihoods and gradients, isolating rows whose evaluation raises."""
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            return attribute_gradients(z, features, atn)
        except NoradError:
            if z.shape[0] == 1:
                return np.full(1, np.nan), np.full_like(z, np.nan)
    parts = [_row_gradients(z[i:i + 1], features[i:i + 1], atn) for i in range(z.shape[0])]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def rectify(
        z: np.ndarray,
        graph: AttributedGraph,
        atn: AtnParams,
        config: Optional[RectifyConfig] = None) -> RectifyResult:
    """
    Refine the representations of the target nodes by plain gradient ascent on their
    attribute log-likelihood, ``z_i ← z_i + ε ∇ log p(x_i | z_i)``, with the attribute decoder
    frozen. Rows evolve independently and are updated together.

    Args:
        z (np.ndarray): ``n × K`` deterministic representations.
        graph (AttributedGraph): training graph (its isolated nodes are the default targets).
        atn (AtnParams): trained attribute decoder.
        config (RectifyConfig): step size, iterations and targets (defaults when omitted).

    Raises:
        ContractError: if a target node is out of range.
    """
    config = config or RectifyConfig()
    z = np.asarray(z, dtype=np.float64)
    if config.targets is None:
        targets = isolated_nodes(graph.edges, graph.n)
    else:
        targets = sorted(set(int(t) for t in config.targets))
    if targets and (targets[0] < 0 or targets[-1] >= z.shape[0]):
        raise ContractError(f"Target nodes must lie in [0, {z.shape[0]})")
    result = RectifyResult(z=z.copy(), targets=targets)
    if not targets:
        LOGGER.info("No target nodes to rectify")
        return result

    index = np.asarray(targets, dtype=np.int64)
    rows = z[index].copy()
    features = np.asarray(graph.features[index], dtype=np.float64)
    mask = (rows != 0).astype(np.float64) if config.preserve_sparsity else None
    active = np.ones(len(targets), dtype=bool)
    traces: List[List[float]] = [[] for _ in targets]
    for step in range(config.iterations + 1):
        positions = np.flatnonzero(active)
        if positions.size == 0:
            break
        ll, grads = _row_gradients(rows[positions], features[positions], atn)
        finite = np.isfinite(ll) & np.all(np.isfinite(grads), axis=1)
        for position, value, ok in zip(positions, ll, finite):
            traces[position].append(float(value))
            if not ok:
                active[position] = False
                LOGGER.warning(
                    f"Node {targets[position]}: non-finite log-likelihood at step {step}, "
                    f"keeping its original representation")
        if step == config.iterations:
            break
        positions, grads = positions[finite], grads[finite]
        if mask is not None:
            grads = grads * mask[positions]
        rows[positions] = rows[positions] + config.epsilon * grads

    for position, node in enumerate(targets):
        result.trace[node] = traces[position]
        if active[position]:
            result.z[node] = rows[position]
        else:
            result.failed.append(node)
    LOGGER.info(
        f"Rectified {len(targets) - len(result.failed)} nodes with {config.iterations} steps of "
        f"size {config.epsilon}" + (f", {len(result.failed)} failed" if result.failed else ""))
    return result
