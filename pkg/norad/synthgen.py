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
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from norad.autodiff import Parameter
from norad.autodiff.ops import Sigmoid
from norad.config import rng_stream
from norad.errors import ConfigError, DimensionError
from norad.graph.store import AttributedGraph, write_graph
from norad.model.atn import AtnParams, attribute_probs_numpy
from norad.model.prior import SpikeSlabPrior


LOGGER = logging.getLogger('norad.synthgen')

PLANTED_FILE = "planted.json"
NULL_CLASS = "null"


@dataclass
class PlantedInstance:
    """
    Attributed graph sampled from the generative model, with the latent state that produced it.
    """
    graph: AttributedGraph
    z_true: np.ndarray
    c_true: np.ndarray
    v_true: np.ndarray
    b_true: np.ndarray
    atn_true: AtnParams
    prior: SpikeSlabPrior
    seed: int


@dataclass
class SynthPreset:
    """
    Parameters of a planted instance. The default slab ``Gaussian(1, 0.5)`` keeps nearly all
    the active memberships positive, so that an assortative blockmodel links the members of a
    community. With ``blind_attributes`` every community has the same attribute projection,
    and the attributes depend on the total membership of a node only.
    """
    n: int = 200
    k: int = 4
    delta: float = 0.3
    u: float = 1.0
    s: float = 0.5
    diag: float = 4.0
    offdiag: float = -4.0
    d_prime: int = 16
    d_dprime: int = 8
    num_attributes: int = 64
    blind_attributes: bool = False
    seed: int = 0


PRESETS: Dict[str, SynthPreset] = {
    "recovery": SynthPreset(),
    # neither the edges nor the attributes carry community information
    "blind": SynthPreset(diag=-2.0, offdiag=-2.0, blind_attributes=True),
    "tiny": SynthPreset(n=12, k=4, d_prime=8, d_dprime=4, num_attributes=8),
}


def planted_blockmodel(k: int, diag_value: float, offdiag_value: float) -> np.ndarray:
    b = np.full((k, k), float(offdiag_value))
    np.fill_diagonal(b, float(diag_value))
    return b


def random_atn(
        k: int,
        d_prime: int,
        d_dprime: int,
        num_attributes: int,
        seed: int,
        tied_communities: bool = False) -> AtnParams:
    """
    Glorot-uniform attribute decoder drawn from the ``atn`` stream of ``seed``. With
    ``tied_communities`` all the rows of the projection ``T`` equal the first one.
    """
    atn = AtnParams.initialize(
        k, d_prime, d_dprime, num_attributes, rng_stream(seed, "atn"), trainable=False)
    if tied_communities:
        atn.t.assign(np.repeat(atn.t.data[:1], k, axis=0))
    return atn


def planted_labels(
        c_true: np.ndarray, z_true: Optional[np.ndarray] = None) -> Tuple[np.ndarray, List[str]]:
    """
    Ground-truth classes: the active community with the largest ``|z_ik|`` (lowest index on
    ties); nodes without active spikes form an extra ``null`` class.

    Returns:
        Tuple[np.ndarray, List[str]]: class ids (``K`` for the null class) and class names.
    """
    c_true = np.asarray(c_true)
    k = c_true.shape[1]
    magnitude = np.abs(z_true) if z_true is not None else np.ones(c_true.shape)
    if magnitude.shape != c_true.shape:
        raise DimensionError(f"c {c_true.shape} and z {magnitude.shape} differ in shape")
    masked = np.where(c_true > 0, magnitude, -1.0)
    labels = np.argmax(masked, axis=1)
    labels[~np.any(c_true > 0, axis=1)] = k
    width = len(str(max(k - 1, 0)))
    names = [f"c{i:0{width}d}" for i in range(k)] + [NULL_CLASS]
    return labels.astype(np.int64), names


def _sample_edges(z: np.ndarray, b: np.ndarray, rng: np.random.Generator,
                  block_rows: int = 512) -> np.ndarray:
    n = z.shape[0]
    edges = []
    for start in range(0, n, block_rows):
        rows = np.arange(start, min(start + block_rows, n))
        probs = Sigmoid.forward(z[rows] @ b @ z.T)
        draws = rng.random(probs.shape)
        upper = np.arange(n)[None, :] > rows[:, None]
        i, j = np.nonzero((draws < probs) & upper)
        edges.append(np.stack([rows[i], j], axis=1))
    return np.concatenate(edges) if edges else np.zeros((0, 2), dtype=np.int64)


def generate(
        n: int,
        k: int,
        prior: SpikeSlabPrior,
        b_true: np.ndarray,
        atn_true: AtnParams,
        seed: int) -> PlantedInstance:
    """
    Sample ``C ~ Bernoulli(δ)``, ``V ~ Gaussian(u, s)``, ``Z = C ⊙ V``, one edge draw
    ``Bernoulli(sigmoid(z_iᵀ B z_j))`` per unordered pair ``i < j`` and binary attributes
    from the attribute decoder. Every draw comes from the ``synth`` stream of ``seed``.
    """
    b_true = np.asarray(b_true, dtype=np.float64)
    if b_true.shape != (k, k) or atn_true.k != k:
        raise DimensionError(
            f"Blockmodel {b_true.shape} and attribute decoder (K={atn_true.k}) must match K={k}")
    if n < 1:
        raise ConfigError(f"n must be positive, got {n}")
    rng = rng_stream(seed, "synth")
    c = (rng.random((n, k)) < prior.delta).astype(np.float64)
    v = prior.u + prior.s * rng.standard_normal((n, k))
    z = c * v
    edges = _sample_edges(z, b_true, rng)
    features = (rng.random((n, atn_true.num_attributes)) < attribute_probs_numpy(z, atn_true))
    labels, label_names = planted_labels(c, z)
    graph = AttributedGraph(
        n=n, edges=edges, features=features.astype(np.uint8), labels=labels,
        label_names=label_names)
    LOGGER.info(
        f"Sampled graph with {n} nodes, {graph.num_edges} edges "
        f"(density {2 * graph.num_edges / max(n * (n - 1), 1):.4f}), "
        f"{atn_true.num_attributes} attributes")
    return PlantedInstance(
        graph=graph, z_true=z, c_true=c, v_true=v, b_true=b_true, atn_true=atn_true,
        prior=prior, seed=seed)


def resolve_preset(preset: Union[str, SynthPreset, Dict[str, Any]]) -> SynthPreset:
    if isinstance(preset, SynthPreset):
        return preset
    if isinstance(preset, str):
        if preset not in PRESETS:
            raise ConfigError(f"Unknown preset `{preset}`, available: {sorted(PRESETS)}")
        return PRESETS[preset]
    known = set(SynthPreset.__dataclass_fields__)
    unknown = sorted(set(preset) - known)
    if unknown:
        raise ConfigError(f"Unknown synthesis parameters: {unknown}")
    return SynthPreset(**preset)


def generate_preset(
        preset: Union[str, SynthPreset, Dict[str, Any]],
        seed: Optional[int] = None) -> PlantedInstance:
    preset = resolve_preset(preset)
    seed = preset.seed if seed is None else seed
    return generate(
        preset.n, preset.k, SpikeSlabPrior(preset.delta, preset.u, preset.s),
        planted_blockmodel(preset.k, preset.diag, preset.offdiag),
        random_atn(
            preset.k, preset.d_prime, preset.d_dprime, preset.num_attributes, seed,
            tied_communities=preset.blind_attributes),
        seed)


def write_instance(instance: PlantedInstance, directory: str) -> None:
    """Write the graph files and the ``planted.json`` sidecar with the latent state."""
    write_graph(instance.graph, directory)
    planted = {
        "seed": instance.seed,
        "prior": asdict(instance.prior),
        "z_true": instance.z_true.tolist(),
        "c_true": instance.c_true.astype(int).tolist(),
        "b_true": instance.b_true.tolist(),
        "labels": instance.graph.labels.tolist(),
        "label_names": instance.graph.label_names,
        "atn": {p.name: p.data.tolist() for p in instance.atn_true.parameters()},
    }
    with open(Path(directory) / PLANTED_FILE, "w", encoding="utf-8") as f:
        json.dump(planted, f)


def load_planted(directory: str) -> Dict[str, Any]:
    """Read ``planted.json``, with the latent state and decoder weights as arrays."""
    with open(Path(directory) / PLANTED_FILE, "r", encoding="utf-8") as f:
        planted = json.load(f)
    for key in ("z_true", "c_true", "b_true", "labels"):
        planted[key] = np.asarray(planted[key])
    atn = {name: np.asarray(value) for name, value in planted["atn"].items()}
    planted["atn"] = AtnParams(
        t=Parameter("atn.T", atn["atn.T"], trainable=False),
        u=Parameter("atn.U", atn["atn.U"], trainable=False),
        w_q=Parameter("atn.W_q", atn["atn.W_q"], trainable=False),
        w_k=Parameter("atn.W_k", atn["atn.W_k"], trainable=False))
    return planted
