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

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Optional, Type

import numpy as np

from norad.autodiff.tensor import Tensor
from norad.config import arithmetic_threads
from norad.errors import DimensionError, DomainError


ELEMENTWISE_OPS: Dict[str, Type["UnaryOp"]] = {}


def register_elementwise(name: str):
    """
    Decorator for registering a unary elementwise operation.

    Raises:
        TypeError: If the decorated class is not a subclass of :class:`UnaryOp`.
    """
    def register(cls):
        if not issubclass(cls, UnaryOp):
            raise TypeError(f"Cannot register {cls.__name__}: must be a subclass of UnaryOp")
        ELEMENTWISE_OPS[name] = cls
        return cls

    return register


class UnaryOp:
    """
    Unary elementwise operation with an analytic derivative.

    Subclasses implement :meth:`forward` and :meth:`derivative`; the latter receives both the
    input and the output of the forward pass, so that derivatives expressed through the output
    (e.g. sigmoid) do not recompute it.
    """
    @staticmethod
    def forward(x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @staticmethod
    def derivative(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def _stable_sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    positive = x >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    exp_x = np.exp(x[~positive])
    out[~positive] = exp_x / (1.0 + exp_x)
    return out


@register_elementwise("sigmoid")
class Sigmoid(UnaryOp):
    @staticmethod
    def forward(x):
        return _stable_sigmoid(x)

    @staticmethod
    def derivative(x, y):
        return y * (1.0 - y)


@register_elementwise("relu")
class Relu(UnaryOp):
    @staticmethod
    def forward(x):
        return np.maximum(x, 0.0)

    @staticmethod
    def derivative(x, y):
        return (x > 0).astype(np.float64)


@register_elementwise("exp")
class Exp(UnaryOp):
    @staticmethod
    def forward(x):
        return np.exp(x)

    @staticmethod
    def derivative(x, y):
        return y


@register_elementwise("log")
class Log(UnaryOp):
    @staticmethod
    def forward(x):
        if np.any(x <= 0):
            raise DomainError(f"log of non-positive value (min {float(np.min(x))})")
        return np.log(x)

    @staticmethod
    def derivative(x, y):
        return 1.0 / x


@register_elementwise("softplus")
class Softplus(UnaryOp):
    @staticmethod
    def forward(x):
        # max(x, 0) + log1p(exp(-|x|)) never overflows
        return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))

    @staticmethod
    def derivative(x, y):
        return _stable_sigmoid(x)


@register_elementwise("abs")
class Abs(UnaryOp):
    @staticmethod
    def forward(x):
        return np.abs(x)

    @staticmethod
    def derivative(x, y):
        return np.sign(x)


def _check_same_shape(op: str, a: Tensor, b: Tensor) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"{op}: shape mismatch between {a.shape} and {b.shape}")


def unary(name: str, t: Tensor) -> Tensor:
    op_cls = ELEMENTWISE_OPS[name]
    x = t.data
    y = op_cls.forward(x)

    def backward_fn(g):
        return (g * op_cls.derivative(x, y),)

    return Tensor.from_op(y, name, (t,), backward_fn)


def sigmoid(t: Tensor) -> Tensor:
    return unary("sigmoid", t)


def relu(t: Tensor) -> Tensor:
    return unary("relu", t)


def exp(t: Tensor) -> Tensor:
    return unary("exp", t)


def log(t: Tensor) -> Tensor:
    return unary("log", t)


def softplus(t: Tensor) -> Tensor:
    return unary("softplus", t)


def absolute(t: Tensor) -> Tensor:
    return unary("abs", t)


def add(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape("add", a, b)
    return Tensor.from_op(a.data + b.data, "add", (a, b), lambda g: (g, g))


def sub(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape("sub", a, b)
    return Tensor.from_op(a.data - b.data, "sub", (a, b), lambda g: (g, -g))


def hadamard(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape("hadamard", a, b)
    a_data, b_data = a.data, b.data
    return Tensor.from_op(
        a_data * b_data, "hadamard", (a, b), lambda g: (g * b_data, g * a_data))


def scale(t: Tensor, factor: float) -> Tensor:
    factor = float(factor)
    return Tensor.from_op(t.data * factor, "scale", (t,), lambda g: (g * factor,))


def shift(t: Tensor, offset: float) -> Tensor:
    offset = float(offset)
    return Tensor.from_op(t.data + offset, "shift", (t,), lambda g: (g,))


_BINARY = {"add": add, "sub": sub, "hadamard": hadamard}


def elementwise(op: str, *operands: Tensor, factor: Optional[float] = None) -> Tensor:
    """
    Dispatch an elementwise operation by name.

    Args:
        op (str): one of ``add``, ``sub``, ``hadamard`` (binary, equal shapes), ``scale``
            (requires ``factor``) or any registered unary operation (``sigmoid``, ``relu``,
            ``exp``, ``log``, ``softplus``).
        operands (Tensor): the operands.
        factor (float, optional): the scalar of ``scale``.
    """
    if op in _BINARY:
        assert len(operands) == 2, f"{op} takes two operands"
        return _BINARY[op](*operands)
    if op == "scale":
        assert len(operands) == 1 and factor is not None, "scale takes one operand and a factor"
        return scale(operands[0], factor)
    if op not in ELEMENTWISE_OPS:
        raise ValueError(f"Unknown elementwise operation `{op}`")
    assert len(operands) == 1, f"{op} takes one operand"
    return unary(op, operands[0])


def clip(t: Tensor, low: float, high: float) -> Tensor:
    """Clamp to ``[low, high]``; the gradient is zero where the clamp is active."""
    x = t.data
    inside = ((x > low) & (x < high)).astype(np.float64)
    return Tensor.from_op(np.clip(x, low, high), "clip", (t,), lambda g: (g * inside,))


def transpose(t: Tensor) -> Tensor:
    if len(t.shape) != 2:
        raise DimensionError(f"transpose requires a matrix, got shape {t.shape}")
    return Tensor.from_op(t.data.T, "transpose", (t,), lambda g: (g.T,))


def reshape(t: Tensor, shape) -> Tensor:
    original = t.shape
    try:
        value = t.data.reshape(shape)
    except ValueError:
        raise DimensionError(f"Cannot reshape {original} into {shape}")
    return Tensor.from_op(value, "reshape", (t,), lambda g: (g.reshape(original),))


def dense_matmul(a: np.ndarray, b: np.ndarray, block_rows: int = 256) -> np.ndarray:
    """
    Plain matrix product; with ``NORAD_THREADS > 1`` row blocks of ``a`` are multiplied on a
    thread pool.
    """
    threads = arithmetic_threads()
    if threads == 1 or a.shape[0] <= block_rows:
        return a @ b
    out = np.empty((a.shape[0], b.shape[1]), dtype=np.float64)

    def run(start):
        out[start:start + block_rows] = a[start:start + block_rows] @ b

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(run, range(0, a.shape[0], block_rows)))
    return out


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """
    Matrix product of two matrices.

    Raises:
        DimensionError: if the operands are not matrices or the inner dimensions differ.
    """
    if len(a.shape) != 2 or len(b.shape) != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul: incompatible shapes {a.shape} and {b.shape}")
    a_data, b_data = a.data, b.data

    def backward_fn(g):
        grad_a = dense_matmul(g, b_data.T) if a.requires_grad else None
        grad_b = dense_matmul(a_data.T, g) if b.requires_grad else None
        return grad_a, grad_b

    return Tensor.from_op(dense_matmul(a_data, b_data), "matmul", (a, b), backward_fn)


def _check_axis(t: Tensor, axis: Optional[int]) -> None:
    if axis is not None and not -len(t.shape) <= axis < len(t.shape):
        raise DimensionError(f"Invalid axis {axis} for shape {t.shape}")


def reduce_sum(t: Tensor, axis: Optional[int] = None) -> Tensor:
    _check_axis(t, axis)
    shape = t.shape

    def backward_fn(g):
        if axis is None:
            return (np.full(shape, float(g.reshape(-1)[0])),)
        return (np.broadcast_to(np.expand_dims(g, axis), shape).copy(),)

    return Tensor.from_op(np.sum(t.data, axis=axis), "sum", (t,), backward_fn)


def reduce_mean(t: Tensor, axis: Optional[int] = None) -> Tensor:
    _check_axis(t, axis)
    count = t.size if axis is None else t.shape[axis]
    return scale(reduce_sum(t, axis), 1.0 / count)


_REDUCTIONS: Dict[str, Callable[[Tensor, Optional[int]], Tensor]] = {
    "sum": reduce_sum,
    "mean": reduce_mean,
}


def reduce(op: str, t: Tensor, axis: Optional[int] = None) -> Tensor:
    if op not in _REDUCTIONS:
        raise ValueError(f"Unknown reduction `{op}`")
    return _REDUCTIONS[op](t, axis)


def l2_normalize_rows(t: Tensor) -> Tensor:
    """Divide every row by its Euclidean norm; zero rows stay zero (with zero gradient)."""
    if len(t.shape) != 2:
        raise DimensionError(f"l2_normalize_rows requires a matrix, got shape {t.shape}")
    x = t.data
    norms = np.sqrt(np.sum(x * x, axis=1, keepdims=True))
    safe = np.where(norms > 0, norms, 1.0)
    y = np.where(norms > 0, x / safe, 0.0)

    def backward_fn(g):
        projected = g - y * np.sum(y * g, axis=1, keepdims=True)
        return (np.where(norms > 0, projected / safe, 0.0),)

    return Tensor.from_op(y, "l2_normalize_rows", (t,), backward_fn)
