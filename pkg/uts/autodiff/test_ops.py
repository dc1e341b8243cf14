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


import unittest
from unittest import mock

import numpy as np
import torch

from norad.autodiff import Parameter, backward, clip, constant, dense_matmul, elementwise, \
    l2_normalize_rows, matmul, reduce, reduce_mean, reduce_sum, reshape, transpose
from norad.autodiff.ops import ELEMENTWISE_OPS, Sigmoid, Softplus
from norad.errors import DimensionError, DomainError


def torch_grad(fn, value):
    x = torch.tensor(value, dtype=torch.float64, requires_grad=True)
    fn(x).sum().backward()
    return x.grad.numpy()


class TestElementwise(unittest.TestCase):
    def setUp(self):
        self.values = np.random.default_rng(3).normal(size=(4, 5))

    def _check_against_torch(self, name, torch_fn, values):
        x = Parameter("x", values)
        out = elementwise(name, x)
        expected = torch_fn(torch.tensor(values, dtype=torch.float64)).numpy()
        np.testing.assert_allclose(out.data, expected, rtol=1e-12, atol=1e-12)
        grads = backward(reduce_sum(out), [x])
        np.testing.assert_allclose(
            grads["x"], torch_grad(torch_fn, values), rtol=1e-10, atol=1e-12)

    def test_sigmoid(self):
        self._check_against_torch("sigmoid", torch.sigmoid, self.values)

    def test_relu(self):
        self._check_against_torch("relu", torch.relu, self.values)

    def test_exp(self):
        self._check_against_torch("exp", torch.exp, self.values)

    def test_log(self):
        self._check_against_torch("log", torch.log, np.abs(self.values) + 0.1)

    def test_softplus(self):
        self._check_against_torch("softplus", torch.nn.functional.softplus, self.values)

    def test_abs(self):
        self._check_against_torch("abs", torch.abs, self.values)

    def test_log_outside_domain(self):
        with self.assertRaises(DomainError):
            elementwise("log", constant([1.0, 0.0]))

    def test_extreme_logits_are_finite(self):
        logits = np.array([-500.0, -30.0, 0.0, 30.0, 500.0])
        self.assertTrue(np.all(np.isfinite(Sigmoid.forward(logits))))
        log_sigmoid = -Softplus.forward(-logits)
        self.assertTrue(np.all(np.isfinite(log_sigmoid)))
        self.assertAlmostEqual(log_sigmoid[2], np.log(0.5))
        self.assertAlmostEqual(Sigmoid.forward(logits)[0], 0.0)
        self.assertAlmostEqual(Sigmoid.forward(logits)[-1], 1.0)

    def test_binary_shape_mismatch(self):
        with self.assertRaises(DimensionError):
            elementwise("add", constant([1.0, 2.0]), constant([1.0, 2.0, 3.0]))

    def test_unknown_operation(self):
        with self.assertRaises(ValueError):
            elementwise("tanh", constant([1.0]))

    def test_registry(self):
        self.assertEqual(
            set(ELEMENTWISE_OPS), {"sigmoid", "relu", "exp", "log", "softplus", "abs"})

    def test_clip_gradient_is_zero_outside(self):
        x = Parameter("x", [-2.0, 0.5, 2.0])
        grads = backward(reduce_sum(clip(x, -1.0, 1.0)), [x])
        np.testing.assert_array_equal(grads["x"], [0.0, 1.0, 0.0])


class TestMatrixOps(unittest.TestCase):
    def test_matmul_against_torch(self):
        rng = np.random.default_rng(0)
        a_value, b_value = rng.normal(size=(3, 4)), rng.normal(size=(4, 2))
        a, b = Parameter("a", a_value), Parameter("b", b_value)
        grads = backward(reduce_sum(matmul(a, b)), [a, b])
        a_t = torch.tensor(a_value, requires_grad=True)
        b_t = torch.tensor(b_value, requires_grad=True)
        (a_t @ b_t).sum().backward()
        np.testing.assert_allclose(grads["a"], a_t.grad.numpy(), rtol=1e-12)
        np.testing.assert_allclose(grads["b"], b_t.grad.numpy(), rtol=1e-12)

    def test_matmul_shape_mismatch(self):
        with self.assertRaises(DimensionError):
            matmul(constant(np.ones((2, 3))), constant(np.ones((2, 3))))

    def test_transpose_and_reshape(self):
        x = Parameter("x", np.arange(6.0).reshape(2, 3))
        self.assertEqual(transpose(x).shape, (3, 2))
        self.assertEqual(reshape(x, (3, 2)).shape, (3, 2))
        with self.assertRaises(DimensionError):
            reshape(x, (4, 2))
        with self.assertRaises(DimensionError):
            transpose(constant([1.0, 2.0]))

    def test_reductions(self):
        x = Parameter("x", np.arange(6.0).reshape(2, 3))
        np.testing.assert_array_equal(reduce("sum", x, axis=0).data, [3.0, 5.0, 7.0])
        np.testing.assert_array_equal(reduce_mean(x, axis=1).data, [1.0, 4.0])
        grads = backward(reduce_sum(reduce_mean(x, axis=1)), [x])
        np.testing.assert_allclose(grads["x"], np.full((2, 3), 1.0 / 3.0))
        with self.assertRaises(DimensionError):
            reduce_sum(x, axis=2)
        with self.assertRaises(ValueError):
            reduce("max", x)

    def test_l2_normalize_rows_against_torch(self):
        value = np.array([[3.0, 4.0], [1.0, -2.0]])
        weights = np.array([[1.0, 2.0], [-1.0, 0.5]])
        x = Parameter("x", value)
        out = l2_normalize_rows(x)
        np.testing.assert_allclose(out.data[0], [0.6, 0.8])
        grads = backward(reduce_sum(out * constant(weights)), [x])

        def torch_fn(t):
            return torch.nn.functional.normalize(t, dim=1) * torch.tensor(weights)

        np.testing.assert_allclose(grads["x"], torch_grad(torch_fn, value), rtol=1e-10)

    def test_l2_normalize_zero_row(self):
        x = Parameter("x", [[0.0, 0.0], [1.0, 0.0]])
        out = l2_normalize_rows(x)
        np.testing.assert_array_equal(out.data[0], [0.0, 0.0])
        grads = backward(reduce_sum(out), [x])
        np.testing.assert_array_equal(grads["x"][0], [0.0, 0.0])

    def test_threaded_dense_matmul_matches(self):
        rng = np.random.default_rng(1)
        a, b = rng.normal(size=(600, 7)), rng.normal(size=(7, 5))
        sequential = dense_matmul(a, b, block_rows=128)
        with mock.patch.dict("os.environ", {"NORAD_THREADS": "4"}):
            threaded = dense_matmul(a, b, block_rows=128)
        np.testing.assert_allclose(sequential, threaded, rtol=1e-12)


if __name__ == '__main__':
    unittest.main()
