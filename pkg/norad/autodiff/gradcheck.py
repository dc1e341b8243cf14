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
from typing import Callable, Iterable

import numpy as np

from norad.autodiff.tensor import Parameter, Tensor, backward
from norad.errors import ContractError, NumericError


LOGGER = logging.getLogger('norad.autodiff.gradcheck')


def _evaluate(loss_fn: Callable[[], Tensor]) -> float:
    value = loss_fn().item()
    if not np.isfinite(value):
        raise NumericError(f"Non-finite loss {value} during gradient check", term="loss")
    return value


def grad_check(
        loss_fn: Callable[[], Tensor],
        params: Iterable[Parameter],
        epsilon: float = 1e-5) -> float:
    """
    Compare the tape gradient of a scalar loss with central finite differences
    ``(f(p + ε) - f(p - ε)) / 2ε``, coordinate by coordinate.

    ``loss_fn`` must rebuild the graph from the current parameter values and be deterministic
    (any reparameterization noise frozen by the caller). Parameter values are restored after
    each perturbation.

    Args:
        loss_fn (Callable[[], Tensor]): builds the scalar loss.
        params (Iterable[Parameter]): parameters to check.
        epsilon (float): perturbation size.

    Returns:
        float: worst relative error, with denominator ``max(|analytic|, |numeric|, 1e-8)``.

    Raises:
        ContractError: if ``epsilon`` is not positive.
        NumericError: if the loss is not finite.
    """
    if epsilon <= 0:
        raise ContractError(f"epsilon must be > 0, got {epsilon}")
    params = list(params)
    output = loss_fn()
    if not np.isfinite(output.item()):
        raise NumericError(f"Non-finite loss {output.item()} during gradient check", term="loss")
    analytic = backward(output, params)
    worst = 0.0
    for param in params:
        original = param.data.copy()
        flat = original.reshape(-1)
        grad = analytic[param.name].reshape(-1)
        worst_param = 0.0
        for index in range(flat.size):
            perturbed = flat.copy()
            perturbed[index] = flat[index] + epsilon
            param.assign(perturbed.reshape(original.shape))
            f_plus = _evaluate(loss_fn)
            perturbed[index] = flat[index] - epsilon
            param.assign(perturbed.reshape(original.shape))
            f_minus = _evaluate(loss_fn)
            numeric = (f_plus - f_minus) / (2 * epsilon)
            denominator = max(abs(grad[index]), abs(numeric), 1e-8)
            worst_param = max(worst_param, abs(grad[index] - numeric) / denominator)
        param.assign(original)
        LOGGER.debug(f"Max relative error on {param.name}: {worst_param:.3e}")
        worst = max(worst, worst_param)
    return worst
