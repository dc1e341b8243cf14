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
import unittest

import numpy as np
from scipy.stats import norm

from norad.autodiff import Parameter, backward, constant, reduce_sum
from norad.errors import ConfigError, ContractError, DomainError
from norad.model.prior import SpikeSlabPrior, compose, kl_bernoulli, kl_gaussian, \
    sample_gaussian, sample_relaxed_bernoulli, temperature_schedule


class TestSpikeSlabPrior(unittest.TestCase):
    def test_defaults(self):
        prior = SpikeSlabPrior()
        self.assertEqual((prior.delta, prior.u, prior.s), (0.5, 0.0, 1.0))

    def test_degenerate_spike_allowed(self):
        SpikeSlabPrior(delta=0.0)
        SpikeSlabPrior(delta=1.0)

    def test_invalid_values(self):
        with self.assertRaises(ConfigError):
            SpikeSlabPrior(delta=1.5)
        with self.assertRaises(ConfigError):
            SpikeSlabPrior(s=0.0)


class TestRelaxedBernoulli(unittest.TestCase):
    def test_symmetric_point(self):
        for temperature in (0.1, 0.5, 2.0):
            c = sample_relaxed_bernoulli(np.array([[0.5]]), temperature, np.array([[0.5]]))
            self.assertAlmostEqual(c.item(), 0.5)

    def test_low_temperature_hardens(self):
        c = sample_relaxed_bernoulli(np.array([[0.9]]), 0.01, np.array([[0.5]]))
        self.assertGreater(c.item(), 0.99)

    def test_noise_on_the_boundary(self):
        with self.assertRaises(DomainError):
            sample_relaxed_bernoulli(np.array([[0.5]]), 1.0, np.array([[0.0]]))
        with self.assertRaises(DomainError):
            sample_relaxed_bernoulli(np.array([[0.5]]), 1.0, np.array([[1.0]]))

    def test_non_positive_temperature(self):
        with self.assertRaises(ContractError):
            sample_relaxed_bernoulli(np.array([[0.5]]), 0.0, np.array([[0.5]]))

    def test_monte_carlo_mean_is_stable_across_seeds(self):
        means = []
        for seed in (1, 2):
            noise = np.random.default_rng(seed).uniform(1e-12, 1.0, size=(100000, 1))
            eta = np.full((100000, 1), 0.7)
            means.append(float(np.mean(sample_relaxed_bernoulli(eta, 0.5, noise).data)))
        self.assertAlmostEqual(means[0], means[1], delta=0.02)
        self.assertGreater(means[0], 0.5)

    def test_gradient_flows_to_eta(self):
        eta = Parameter("eta", [[0.3, 0.6]])
        c = sample_relaxed_bernoulli(eta, 0.5, np.array([[0.4, 0.7]]))
        grads = backward(reduce_sum(c), [eta])
        self.assertTrue(np.all(grads["eta"] > 0))


class TestGaussianSample(unittest.TestCase):
    def test_zero_noise(self):
        v = sample_gaussian(np.array([[1.5, -2.0]]), np.array([[3.0, 4.0]]), np.zeros((1, 2)))
        np.testing.assert_array_equal(v.data, [[1.5, -2.0]])

    def test_standard(self):
        noise = np.array([[0.3, -1.2]])
        v = sample_gaussian(np.zeros((1, 2)), np.ones((1, 2)), noise)
        np.testing.assert_array_equal(v.data, noise)

    def test_compose(self):
        sample = compose(constant([[1.0, 0.0]]), constant([[2.0, 3.0]]))
        np.testing.assert_array_equal(sample.z.data, [[2.0, 0.0]])


class TestKl(unittest.TestCase):
    def test_bernoulli_identical(self):
        self.assertAlmostEqual(kl_bernoulli(np.full((2, 3), 0.5), 0.5).item(), 0.0)

    def test_bernoulli_value(self):
        expected = 0.9 * math.log(1.8) + 0.1 * math.log(0.2)
        self.assertAlmostEqual(kl_bernoulli(np.array([[0.9]]), 0.5).item(), expected)
        self.assertAlmostEqual(expected, 0.3681, places=4)

    def test_bernoulli_limit(self):
        value = kl_bernoulli(np.array([[1.0 - 1e-6]]), 0.5).item()
        self.assertAlmostEqual(value, math.log(2.0), places=4)

    def test_bernoulli_invalid_delta(self):
        with self.assertRaises(ContractError):
            kl_bernoulli(np.array([[0.5]]), 0.0)

    def test_gaussian_identical(self):
        self.assertAlmostEqual(
            kl_gaussian(np.full((2, 2), 0.3), np.full((2, 2), 2.0), 0.3, 2.0).item(), 0.0)

    def test_gaussian_shifted_mean(self):
        value = kl_gaussian(np.ones((3, 1)), np.ones((3, 1)), 0.0, 1.0).item()
        self.assertAlmostEqual(value, 1.5)

    def test_gaussian_log_sigma_shortcut(self):
        sigma = np.array([[0.5, 2.0]])
        mu = np.array([[0.1, -0.4]])
        direct = kl_gaussian(mu, sigma, 0.2, 1.5).item()
        shortcut = kl_gaussian(mu, sigma, 0.2, 1.5, log_sigma=np.log(sigma)).item()
        self.assertAlmostEqual(direct, shortcut)

    def test_non_negative(self):
        rng = np.random.default_rng(0)
        eta = rng.uniform(0.01, 0.99, size=(10, 4))
        self.assertGreaterEqual(kl_bernoulli(eta, 0.3).item(), 0.0)
        mu, sigma = rng.normal(size=(10, 4)), rng.uniform(0.1, 3.0, size=(10, 4))
        self.assertGreaterEqual(kl_gaussian(mu, sigma, 0.5, 2.0).item(), 0.0)


class TestKlMonteCarlo(unittest.TestCase):
    """Analytic KL terms against sample averages of ``log q − log p`` (10⁶ draws)."""
    SAMPLES = 1_000_000

    def assertWithinStandardErrors(self, samples, expected, errors=4.0):
        mean = float(np.mean(samples))
        standard_error = float(np.std(samples) / math.sqrt(samples.size))
        self.assertLess(abs(mean - expected), errors * standard_error + 1e-12)

    def test_bernoulli(self):
        rng = np.random.default_rng(21)
        eta, delta = np.array([0.05, 0.3, 0.5, 0.9]), 0.3
        c = rng.random((self.SAMPLES, eta.size)) < eta
        log_ratio = np.where(c, np.log(eta / delta), np.log((1 - eta) / (1 - delta)))
        self.assertWithinStandardErrors(
            log_ratio.sum(axis=1), kl_bernoulli(eta[None, :], delta).item())

    def test_gaussian(self):
        rng = np.random.default_rng(22)
        mu, sigma, u, s = np.array([0.3, -1.0, 2.0]), np.array([0.5, 1.0, 2.5]), 0.5, 1.5
        v = mu + sigma * rng.standard_normal((self.SAMPLES, mu.size))
        log_ratio = norm.logpdf(v, mu, sigma) - norm.logpdf(v, u, s)
        self.assertWithinStandardErrors(
            log_ratio.sum(axis=1), kl_gaussian(mu[None, :], sigma[None, :], u, s).item())


class TestTemperatureSchedule(unittest.TestCase):
    def test_endpoints(self):
        self.assertEqual(temperature_schedule(0, 100, 1.0, 0.5), 1.0)
        self.assertAlmostEqual(temperature_schedule(100, 100, 1.0, 0.5), 0.5)
        self.assertEqual(temperature_schedule(500, 100, 1.0, 0.5), 0.5)

    def test_midpoint(self):
        self.assertAlmostEqual(temperature_schedule(50, 100, 1.0, 0.5), math.sqrt(0.5))

    def test_invalid(self):
        with self.assertRaises(ContractError):
            temperature_schedule(0, 10, 0.4, 0.5)


if __name__ == '__main__':
    unittest.main()
