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

from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from norad.errors import ContractError, DimensionError


BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]
ArrayLike = Union[np.ndarray, float, int, Sequence[float], Sequence[Sequence[float]]]


class Tensor:
    """
    Dense 64-bit tensor and, at the same time, a node of the define-by-run tape.

    A tensor created by an operation remembers the operation tag, its operands and the
    function mapping the gradient of its value to the gradients of the operands. The tape is
    rebuilt at every forward pass: nodes are never reused across passes, with the exception of
    :class:`Parameter` leaves.

    The stored array is read-only: operations always allocate new arrays.

    Args:
        data (ArrayLike): values, copied and converted to ``float64``.
        requires_grad (bool): whether gradients must be propagated to this tensor.
    """
    __slots__ = ("data", "grad", "op", "parents", "backward_fn", "requires_grad")

    def __init__(self, data: ArrayLike, requires_grad: bool = False):
        array = np.array(data, dtype=np.float64)
        if any(dim <= 0 for dim in array.shape):
            raise DimensionError(f"Tensor dimensions must be positive, got shape {array.shape}")
        array.flags.writeable = False
        self.data = array
        self.grad: Optional[np.ndarray] = None
        self.op = "leaf"
        self.parents: Tuple["Tensor", ...] = ()
        self.backward_fn: Optional[BackwardFn] = None
        self.requires_grad = requires_grad

    @classmethod
    def from_op(
            cls,
            value: np.ndarray,
            op: str,
            parents: Sequence["Tensor"],
            backward_fn: BackwardFn) -> "Tensor":
        """
        Wrap the result of an operation without copying it and register it on the tape.

        ``backward_fn`` receives the gradient with respect to ``value`` and returns one
        gradient (or ``None``) per parent, in the same order as ``parents``.
        """
        out = cls.__new__(cls)
        value = np.asarray(value, dtype=np.float64)
        if not value.flags.c_contiguous:
            value = value.copy()
        value.flags.writeable = False
        out.data = value
        out.grad = None
        out.op = op
        out.parents = tuple(parents)
        out.requires_grad = any(p.requires_grad for p in parents)
        out.backward_fn = backward_fn if out.requires_grad else None
        return out

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() requires a single-element tensor, got {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data

    def __repr__(self) -> str:
        return f"{type(self).__name__}(op={self.op}, shape={self.shape})"

    # Operator sugar, restricted to the broadcasting-free semantics of the ops module.
    def __add__(self, other):
        from norad.autodiff import ops
        if isinstance(other, Tensor):
            return ops.add(self, other)
        return ops.shift(self, float(other))

    __radd__ = __add__

    def __sub__(self, other):
        from norad.autodiff import ops
        if isinstance(other, Tensor):
            return ops.sub(self, other)
        return ops.shift(self, -float(other))

    def __rsub__(self, other):
        from norad.autodiff import ops
        return ops.shift(ops.scale(self, -1.0), float(other))

    def __mul__(self, other):
        from norad.autodiff import ops
        if isinstance(other, Tensor):
            return ops.hadamard(self, other)
        return ops.scale(self, float(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        from norad.autodiff import ops
        return ops.scale(self, 1.0 / float(other))

    def __neg__(self):
        from norad.autodiff import ops
        return ops.scale(self, -1.0)

    def __matmul__(self, other):
        from norad.autodiff import ops
        return ops.matmul(self, other)

    @property
    def T(self) -> "Tensor":
        from norad.autodiff import ops
        return ops.transpose(self)


class Parameter(Tensor):
    """
    Named leaf tensor holding a model or variational parameter.

    Parameters live across forward passes; optimizers replace their values through
    :meth:`assign`.

    Args:
        name (str): name, unique within a :class:`ParameterCollection`.
        data (ArrayLike): initial value.
        trainable (bool): whether the parameter receives gradients.
    """
    __slots__ = ("name", "trainable")

    def __init__(self, name: str, data: ArrayLike, trainable: bool = True):
        super().__init__(data, requires_grad=trainable)
        self.name = name
        self.trainable = trainable
        self.op = "param"

    def assign(self, value: np.ndarray) -> None:
        value = np.array(value, dtype=np.float64)
        if value.shape != self.data.shape:
            raise DimensionError(
                f"Cannot assign shape {value.shape} to parameter {self.name} of shape "
                f"{self.data.shape}")
        value.flags.writeable = False
        self.data = value

    def __repr__(self) -> str:
        return f"Parameter(name={self.name}, shape={self.shape}, trainable={self.trainable})"


class ParameterCollection:
    """Ordered set of parameters with unique names."""
    def __init__(self, params: Iterable[Parameter] = ()):
        self._params: Dict[str, Parameter] = {}
        for param in params:
            self.add(param)

    def add(self, param: Parameter) -> Parameter:
        assert param.name not in self._params, f"Duplicate parameter name {param.name}"
        self._params[param.name] = param
        return param

    def __getitem__(self, name: str) -> Parameter:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __iter__(self):
        return iter(self._params.values())

    def __len__(self) -> int:
        return len(self._params)

    def names(self) -> List[str]:
        return list(self._params)

    def snapshot(self) -> Dict[str, np.ndarray]:
        return {name: param.data.copy() for name, param in self._params.items()}

    def restore(self, values: Dict[str, np.ndarray]) -> None:
        for name, value in values.items():
            self._params[name].assign(value)


def constant(data: ArrayLike) -> Tensor:
    return Tensor(data, requires_grad=False)


def _topological_order(output: Tensor) -> List[Tensor]:
    order = []
    visited = set()
    stack = [(output, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(
        output: Tensor,
        params: Optional[Iterable[Parameter]] = None) -> Dict[str, np.ndarray]:
    """
    Reverse-mode sweep from a scalar output.

    Every gradient accumulator reachable from ``output`` is zeroed before the sweep, so that
    repeated calls give identical results. A tensor used by several operations receives the
    sum of the gradients of all the paths.

    Args:
        output (Tensor): scalar tensor (single element).
        params (Iterable[Parameter], optional): parameters whose gradients are returned;
            those not reachable from ``output`` get a zero gradient. When omitted, the reachable
            parameters are returned.

    Returns:
        Dict[str, np.ndarray]: mapping parameter name → gradient (same shape as the value).

    Raises:
        ContractError: if ``output`` is not a scalar.
    """
    if output.data.size != 1:
        raise ContractError(f"backward requires a scalar output, got shape {output.shape}")
    order = _topological_order(output) if output.requires_grad else []
    for node in order:
        node.grad = np.zeros_like(node.data)
    if params is not None:
        params = list(params)
        for param in params:
            param.grad = np.zeros_like(param.data)
    if order:
        output.grad = np.ones_like(output.data)
        for node in reversed(order):
            if node.backward_fn is None:
                continue
            parent_grads = node.backward_fn(node.grad)
            for parent, parent_grad in zip(node.parents, parent_grads):
                if parent_grad is None or not parent.requires_grad:
                    continue
                assert parent_grad.shape == parent.data.shape, \
                    f"Gradient of shape {parent_grad.shape} for operand of shape " \
                    f"{parent.data.shape} in {node.op}"
                parent.grad = parent.grad + parent_grad
    if params is None:
        params = [node for node in order if isinstance(node, Parameter)]
    return {param.name: param.grad.copy() for param in params}
