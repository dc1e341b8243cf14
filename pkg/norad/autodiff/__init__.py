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

from norad.autodiff.tensor import Parameter, ParameterCollection, Tensor, backward, constant
from norad.autodiff.ops import ELEMENTWISE_OPS, UnaryOp, absolute, add, clip, dense_matmul, \
    elementwise, exp, hadamard, l2_normalize_rows, log, matmul, reduce, reduce_mean, reduce_sum, \
    register_elementwise, relu, reshape, scale, shift, sigmoid, softplus, sub, transpose
from norad.autodiff.gradcheck import grad_check


__all__ = [
    "Parameter", "ParameterCollection", "Tensor", "backward", "constant", "ELEMENTWISE_OPS",
    "UnaryOp", "absolute", "add", "clip", "dense_matmul", "elementwise", "exp", "hadamard",
    "l2_normalize_rows", "log", "matmul", "reduce", "reduce_mean", "reduce_sum",
    "register_elementwise", "relu", "reshape", "scale", "shift", "sigmoid", "softplus", "sub",
    "transpose", "grad_check",
]
