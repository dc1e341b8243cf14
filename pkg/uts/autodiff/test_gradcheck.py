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

from norad.autodiff import Parameter, constant, grad_check, hadamard, matmul, reduce_sum, \
    sigmoid, softplus
from norad.autodiff.ops import ELEMENTWISE_OPS, Sigmoid
from norad.errors import ContractError, NumericError


class DoubledSigmoid(Sigmoid):
    @staticmethod
    def derivative(x, y):
        return 2.0 * y * (1.0 - y)


class TestGradCheck(unittest.TestCase):
    def setUp(self):
        rng = np.random.default_rng(0)
        self.w = Parameter("w", rng.normal(size=(4, 3)))
        self.x = constant(rng.normal(size=(5, 4)))
        self.target = constant((rng.random((5, 3)) < 0.5).astype(float))

    def loss(self):
        logits = matmul(self.x, self.w)
        return reduce_sum(hadamard(self.target, softplus(logits)) + sigmoid(logits))

    def test_correct_gradients_pass(self):
        error = grad_check(self.loss, [self.w])
        self.assertLess(error, 1e-6)

    def test_parameter_values_restored(self):
        before = self.w.data.copy()
        grad_check(self.loss, [self.w])
        np.testing.assert_array_equal(self.w.data, before)

    def test_corrupted_derivative_is_detected(self):
        with mock.patch.dict(ELEMENTWISE_OPS, {"sigmoid": DoubledSigmoid}):
            error = grad_check(self.loss, [self.w])
        self.assertGreater(error, 1e-2)

    def test_invalid_epsilon(self):
        with self.assertRaises(ContractError):
            grad_check(self.loss, [self.w], epsilon=0.0)

    def test_non_finite_loss(self):
        w = Parameter("w", [[np.inf]])
        with self.assertRaises(NumericError):
            grad_check(lambda: reduce_sum(hadamard(w, w)), [w])


if __name__ == '__main__':
    unittest.main()
