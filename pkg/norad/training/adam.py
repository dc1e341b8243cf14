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

from dataclasses import dataclass, field
from typing import Dict, Iterable

import numpy as np

from norad.autodiff import Parameter
from norad.errors import ContractError, DimensionError


@dataclass
class AdamState:
    """
    Moment estimates of a group of parameters sharing a step counter.

    The update is an ascent step, since the training maximizes its objectives.
    """
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    first_moments: Dict[str, np.ndarray] = field(default_factory=dict)
    second_moments: Dict[str, np.ndarray] = field(default_factory=dict)

    def begin_step(self) -> int:
        self.step += 1
        return self.step


def adam_update(param: Parameter, grad: np.ndarray, state: AdamState, lr: float) -> None:
    """
    Bias-corrected Adam ascent update of ``param`` using the current step of ``state``.

    Raises:
        ContractError: if no step has been started on ``state``.
        DimensionError: if the gradient shape differs from the parameter shape.
    """
    if state.step < 1:
        raise ContractError("adam_update requires begin_step() to be called first")
    if grad.shape != param.shape:
        raise DimensionError(f"Gradient {grad.shape} does not match {param.name} {param.shape}")
    m = state.first_moments.get(param.name, np.zeros_like(grad))
    v = state.second_moments.get(param.name, np.zeros_like(grad))
    m = state.beta1 * m + (1.0 - state.beta1) * grad
    v = state.beta2 * v + (1.0 - state.beta2) * grad * grad
    state.first_moments[param.name] = m
    state.second_moments[param.name] = v
    m_hat = m / (1.0 - state.beta1 ** state.step)
    v_hat = v / (1.0 - state.beta2 ** state.step)
    param.assign(param.data + lr * m_hat / (np.sqrt(v_hat) + state.eps))


def adam_step(
        params: Iterable[Parameter],
        grads: Dict[str, np.ndarray],
        state: AdamState,
        lr: float) -> None:
    state.begin_step()
    for param in params:
        adam_update(param, grads[param.name], state, lr)
