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

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from norad.autodiff import Tensor, constant, exp, hadamard, log, reduce_sum, scale, shift, \
    sigmoid, sub
from norad.errors import ConfigError, ContractError, DomainError


ETA_BOUNDS = (1e-6, 1.0 - 1e-6)
SIGMA_BOUNDS = (1e-4, 1e4)

TensorLike = Union[Tensor, np.ndarray]


def _as_tensor(value: TensorLike) -> Tensor:
    return value if isinstance(value, Tensor) else constant(value)


@dataclass(frozen=True)
class SpikeSlabPrior:
    """
    Spike-and-slab prior ``c ~ Bernoulli(delta)``, ``v ~ Gaussian(u, s)`` with ``s`` the
    standard deviation.

    Degenerate spikes (``delta`` equal to 0 or 1) are accepted for generating data, but the
    KL terms of the ELBO require ``0 < delta < 1``.
    """
    delta: float = 0.5
    u: float = 0.0
    s: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise ConfigError(f"delta must be in [0, 1], got {self.delta}")
        if self.s <= 0:
            raise ConfigError(f"s must be > 0, got {self.s}")


@dataclass
class VariationalParams:
    """
    Per-node variational parameters produced by the encoder, all ``n × K``.

    Attributes:
        eta (Tensor): Bernoulli probabilities, clamped to ``ETA_BOUNDS``.
        mu (Tensor): Gaussian means.
        log_sigma (Tensor): log standard deviations, clamped to ``log(SIGMA_BOUNDS)``.
    """
    eta: Tensor
    mu: Tensor
    log_sigma: Tensor

    @property
    def sigma(self) -> Tensor:
        return exp(self.log_sigma)


@dataclass
class LatentSample:
    """Relaxed spikes ``c``, slabs ``v`` and their product ``z = c ⊙ v``."""
    c: Tensor
    v: Tensor
    z: Tensor


def _logit(p: Tensor) -> Tensor:
    return sub(log(p), log(shift(scale(p, -1.0), 1.0)))


def sample_relaxed_bernoulli(
        eta: TensorLike, temperature: float, uniform_noise: np.ndarray) -> Tensor:
    """
    Binary-concrete relaxation of ``Bernoulli(eta)``:
    ``c = sigmoid((logit(eta) + logit(noise)) / temperature)``.

    The noise is drawn by the caller so that it can be frozen.

    Raises:
        ContractError: if the temperature is not positive.
        DomainError: if a noise entry is not strictly inside (0, 1).
    """
    if temperature <= 0:
        raise ContractError(f"temperature must be > 0, got {temperature}")
    uniform_noise = np.asarray(uniform_noise, dtype=np.float64)
    if np.any(uniform_noise <= 0) or np.any(uniform_noise >= 1):
        raise DomainError("Uniform noise must lie strictly inside (0, 1)")
    eta = _as_tensor(eta)
    noise_logit = constant(np.log(uniform_noise) - np.log1p(-uniform_noise))
    return sigmoid(scale(_logit(eta) + noise_logit, 1.0 / temperature))


def sample_gaussian(
        mu: TensorLike, sigma: TensorLike, standard_normal_noise: np.ndarray) -> Tensor:
    """Reparameterized Gaussian sample ``v = mu + sigma ⊙ noise``."""
    mu = _as_tensor(mu)
    return mu + hadamard(_as_tensor(sigma), constant(standard_normal_noise))


def compose(c: Tensor, v: Tensor) -> LatentSample:
    return LatentSample(c=c, v=v, z=hadamard(c, v))


def kl_bernoulli(eta: TensorLike, delta: float) -> Tensor:
    """
    ``Σ η log(η/δ) + (1−η) log((1−η)/(1−δ))`` in nats, summed over all the entries.
    """
    if not 0.0 < delta < 1.0:
        raise ContractError(f"delta must be in (0, 1), got {delta}")
    eta = _as_tensor(eta)
    one_minus_eta = shift(scale(eta, -1.0), 1.0)
    on = hadamard(eta, shift(log(eta), -math.log(delta)))
    off = hadamard(one_minus_eta, shift(log(one_minus_eta), -math.log1p(-delta)))
    return reduce_sum(on + off)


def kl_gaussian(
        mu: TensorLike,
        sigma: TensorLike,
        u: float,
        s: float,
        log_sigma: Optional[TensorLike] = None) -> Tensor:
    """
    ``Σ log(s/σ) + (σ² + (μ−u)²) / (2s²) − 1/2`` in nats, summed over all the entries.

    Args:
        mu (TensorLike): means.
        sigma (TensorLike): standard deviations.
        u (float): prior mean.
        s (float): prior standard deviation.
        log_sigma (TensorLike, optional): ``log(sigma)``, when already available.
    """
    if s <= 0:
        raise ContractError(f"s must be > 0, got {s}")
    mu = _as_tensor(mu)
    sigma = _as_tensor(sigma)
    log_sigma = log(sigma) if log_sigma is None else _as_tensor(log_sigma)
    centered = shift(mu, -u)
    quadratic = scale(hadamard(sigma, sigma) + hadamard(centered, centered), 0.5 / (s * s))
    return reduce_sum(shift(quadratic - log_sigma, math.log(s) - 0.5))


def temperature_schedule(step: int, total_steps: int, start: float, floor: float) -> float:
    """
    Exponential annealing ``start · (floor / start)^(step / total_steps)``, clamped at
    ``floor``.
    """
    if floor <= 0 or start < floor:
        raise ContractError(f"Invalid temperatures: start {start}, floor {floor}")
    progress = step / max(total_steps, 1)
    return max(start * (floor / start) ** progress, floor)
