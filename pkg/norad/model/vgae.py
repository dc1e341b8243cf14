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
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from norad.autodiff import Parameter, ParameterCollection, Tensor, constant, scale
from norad.config import TrainConfig, rng_stream
from norad.errors import ConsistencyError, NumericError
from norad.graph.adjacency import adjacency_matrix, normalized_adjacency
from norad.model.atn import AtnParams, attribute_log_likelihood, attribute_probs_batch
from norad.model.encoder import GcnEncoder, GcnEncoderParams, deterministic_representation, \
    soft_representation
from norad.model.osbm import BlockModel, BlockedEdgeLikelihood, b_penalty, positive_weight
from norad.model.prior import SpikeSlabPrior, VariationalParams, compose, kl_bernoulli, \
    kl_gaussian, sample_gaussian, sample_relaxed_bernoulli


LOGGER = logging.getLogger('norad.model.vgae')

ELBO_TERMS = ("edge", "attribute", "kl_bernoulli", "kl_gaussian")


@dataclass
class Noise:
    """Frozen reparameterization noise: uniform in (0, 1) and standard normal, both ``n × K``."""
    uniform: np.ndarray
    normal: np.ndarray

    @classmethod
    def draw(cls, rng: np.random.Generator, n: int, k: int) -> "Noise":
        uniform = rng.uniform(np.finfo(np.float64).tiny, 1.0, size=(n, k))
        return cls(uniform=uniform, normal=rng.standard_normal(size=(n, k)))


@dataclass
class ElboTerms:
    """
    Single-sample ELBO estimate and its components. ``attribute`` is already multiplied by
    the attribute weight.
    """
    total: Tensor
    breakdown: Dict[str, float] = field(default_factory=dict)
    variational: Optional[VariationalParams] = None

    @property
    def value(self) -> float:
        return self.total.item()


class NoradModel:
    """
    Encoder, blockmodel and attribute decoder of a graph, together with the constant parts of
    the objective (training adjacency, propagated attributes, positive weight).

    Args:
        config (TrainConfig): hyper-parameters.
        features (np.ndarray): ``n × D`` binary attributes.
        train_edges (np.ndarray): canonical training edges; only these are visible to the model.
        values (Dict[str, np.ndarray], optional): parameter values (e.g. from a checkpoint).
            When omitted, parameters are initialized from the ``init`` stream of the seed.
    """
    def __init__(
            self,
            config: TrainConfig,
            features: np.ndarray,
            train_edges: np.ndarray,
            values: Optional[Dict[str, np.ndarray]] = None):
        self.config = config
        self.features = np.asarray(features, dtype=np.float64)
        self.n, self.num_attributes = self.features.shape
        self.train_edges = np.asarray(train_edges, dtype=np.int64).reshape(-1, 2)
        self.prior = SpikeSlabPrior(config.prior_delta, config.prior_u, config.prior_s)
        self.alpha = config.effective_alpha

        rng = rng_stream(config.seed, "init")
        self.encoder_params = GcnEncoderParams.initialize(
            self.num_attributes, config.k, rng, l2_normalize=config.l2_normalize)
        self.atn = AtnParams.initialize(
            config.k, config.d_prime, config.d_dprime, self.num_attributes, rng,
            trainable=config.decoder != "no_attr")
        self.block_model = BlockModel.initialize(
            config.k, fixed_identity=config.decoder == "identity_b")
        self.params = ParameterCollection(
            self.encoder_params.parameters() + self.atn.parameters() + [self.block_model.b])
        if values is not None:
            self.load_values(values)

        self.encoder = GcnEncoder(
            normalized_adjacency(self.train_edges, self.n), self.features, self.encoder_params)
        self.pos_weight = positive_weight(
            config.pos_weight, self.n, self.train_edges.shape[0], config.exclude_diagonal)
        self.edge_likelihood = BlockedEdgeLikelihood(
            adjacency_matrix(self.train_edges, self.n), self.pos_weight,
            config.exclude_diagonal, config.block_rows)
        LOGGER.info(
            f"Model with {self.n} nodes, {self.num_attributes} attributes, K={config.k}, "
            f"decoder {config.decoder}, positive weight {self.pos_weight:.3f}")

    def load_values(self, values: Dict[str, np.ndarray]) -> None:
        missing = sorted(set(self.params.names()) - set(values))
        if missing:
            raise ConsistencyError(f"Missing parameter values: {missing}")
        self.params.restore({name: values[name] for name in self.params.names()})

    def e_parameters(self) -> List[Parameter]:
        """Parameters updated in the E-step: the encoder and, when enabled, the ATN."""
        params = self.encoder_params.parameters()
        if self.alpha > 0:
            params += self.atn.parameters()
        return [p for p in params if p.trainable]

    def m_parameters(self) -> List[Parameter]:
        return [self.block_model.b] if self.block_model.b.trainable else []

    def encode(self) -> VariationalParams:
        return self.encoder.encode()

    def elbo(self, noise: Noise, temperature: float) -> ElboTerms:
        """
        Reparameterized single-sample ELBO
        ``edge + α·attribute − KL_bernoulli − KL_gaussian``.

        Raises:
            NumericError: if any term is not finite; the error names the first failing term.
        """
        q = self.encode()
        c = sample_relaxed_bernoulli(q.eta, temperature, noise.uniform)
        v = sample_gaussian(q.mu, q.sigma, noise.normal)
        z = compose(c, v).z
        terms = {"edge": self.edge_likelihood(z, self.block_model.b)}
        if self.alpha > 0:
            probs = attribute_probs_batch(z, self.atn)
            terms["attribute"] = scale(attribute_log_likelihood(self.features, probs), self.alpha)
        else:
            terms["attribute"] = constant(0.0)
        terms["kl_bernoulli"] = kl_bernoulli(q.eta, self.prior.delta)
        terms["kl_gaussian"] = kl_gaussian(
            q.mu, q.sigma, self.prior.u, self.prior.s, log_sigma=q.log_sigma)
        breakdown = {name: terms[name].item() for name in ELBO_TERMS}
        for name in ELBO_TERMS:
            if not math.isfinite(breakdown[name]):
                raise NumericError(
                    f"Non-finite {name} term in the ELBO", term=name, breakdown=breakdown)
        total = terms["edge"] + terms["attribute"] - terms["kl_bernoulli"] - terms["kl_gaussian"]
        breakdown["elbo"] = total.item()
        return ElboTerms(total=total, breakdown=breakdown, variational=q)

    def representation(self, kind: str = "threshold") -> np.ndarray:
        """Deterministic representation: ``threshold`` (Z°) or ``soft`` (η ⊙ μ)."""
        q = self.encode()
        if kind == "soft":
            return soft_representation(q.eta, q.mu)
        return deterministic_representation(q.eta, q.mu)

    def m_objective(self, z: np.ndarray) -> Tuple[Tensor, float]:
        """
        M-step objective: edge log-likelihood of a fixed representation minus the L1 penalty.
        The edge log-likelihood alone is returned as well.
        """
        objective = self.edge_likelihood(constant(z), self.block_model.b)
        value = objective.item()
        if not math.isfinite(value):
            raise NumericError("Non-finite edge term in the M-step", term="edge")
        return objective - b_penalty(self.block_model.b, self.config.gamma), value

    @property
    def b(self) -> np.ndarray:
        return self.block_model.b.data
