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

from norad.model.prior import SpikeSlabPrior, VariationalParams, LatentSample, compose, \
    kl_bernoulli, kl_gaussian, sample_gaussian, sample_relaxed_bernoulli, temperature_schedule
from norad.model.encoder import GcnEncoder, GcnEncoderParams, deterministic_representation, \
    encode, soft_representation
from norad.model.osbm import BlockModel, BlockedEdgeLikelihood, adjacency_log_likelihood, \
    b_penalty, edge_logits, positive_weight
from norad.model.atn import AtnParams, attribute_gradients, attribute_log_likelihood, \
    attribute_probs, attribute_probs_batch, attribute_probs_numpy, rectification_gradient
from norad.model.vgae import ElboTerms, NoradModel, Noise


__all__ = [
    "SpikeSlabPrior", "VariationalParams", "LatentSample", "compose", "kl_bernoulli",
    "kl_gaussian", "sample_gaussian", "sample_relaxed_bernoulli", "temperature_schedule",
    "GcnEncoder", "GcnEncoderParams", "deterministic_representation", "encode",
    "soft_representation", "BlockModel", "BlockedEdgeLikelihood", "adjacency_log_likelihood",
    "b_penalty", "edge_logits", "positive_weight", "AtnParams", "attribute_gradients",
    "attribute_log_likelihood", "attribute_probs", "attribute_probs_batch",
    "attribute_probs_numpy", "rectification_gradient", "ElboTerms", "NoradModel", "Noise",
]
