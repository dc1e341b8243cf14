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

import numpy as np

from norad.autodiff import Parameter
from norad.errors import ConfigError, ContractError
from norad.graph import AttributedGraph
from norad.metrics.link_prediction import isolated_link_report
from norad.model.atn import AtnParams, attribute_gradients, attribute_probs_numpy
from norad.model.prior import SpikeSlabPrior
from norad.rectifier import RectifyConfig, rectify
from norad.synthgen import generate, planted_blockmodel, random_atn


class TestRectify(unittest.TestCase):
    def setUp(self):
        self.atn = random_atn(3, 8, 2, 10, seed=0)
        rng = np.random.default_rng(1)
        self.z_true = rng.normal(size=(8, 3)) * 2
        probs = attribute_probs_numpy(self.z_true, self.atn)
        features = (rng.random(probs.shape) < probs).astype(np.uint8)
        # nodes 5, 6 and 7 have no edges
        self.graph = AttributedGraph(
            n=8, edges=np.array([[0, 1], [1, 2], [2, 3], [3, 4]]), features=features)
        self.z = self.z_true + rng.normal(scale=0.5, size=self.z_true.shape)

    def test_zero_iterations(self):
        result = rectify(self.z, self.graph, self.atn, RectifyConfig(iterations=0))
        np.testing.assert_array_equal(result.z, self.z)
        self.assertEqual(result.targets, [5, 6, 7])
        self.assertTrue(all(len(trace) == 1 for trace in result.trace.values()))

    def test_non_targets_unchanged(self):
        result = rectify(self.z, self.graph, self.atn, RectifyConfig(epsilon=0.01))
        np.testing.assert_array_equal(result.z[:5], self.z[:5])
        self.assertFalse(np.array_equal(result.z[5:], self.z[5:]))
        self.assertEqual(len(result.trace[5]), 51)

    def test_log_likelihood_improves(self):
        result = rectify(self.z, self.graph, self.atn, RectifyConfig(epsilon=0.01))
        before, after = result.log_likelihood_before(), result.log_likelihood_after()
        _, start_grads = attribute_gradients(
            self.z[result.targets], self.graph.features[result.targets], self.atn)
        for node, grad in zip(result.targets, start_grads):
            if np.any(grad != 0):
                self.assertGreater(after[node], before[node])
            else:
                # no active unit in the projection: the row cannot move
                self.assertEqual(after[node], before[node])
        ll, _ = attribute_gradients(result.z[[5]], self.graph.features[[5]], self.atn)
        self.assertAlmostEqual(ll[0], after[5])

    def test_small_steps_ascend(self):
        targets = list(range(8))
        result = rectify(
            self.z, self.graph, self.atn, RectifyConfig(epsilon=1e-3, targets=targets))
        steps = [
            later >= earlier for trace in result.trace.values()
            for earlier, later in zip(trace, trace[1:])]
        self.assertGreaterEqual(np.mean(steps), 0.95)

    def test_preserve_sparsity(self):
        z = self.z.copy()
        z[6, 1] = 0.0
        config = RectifyConfig(epsilon=0.05, targets=[6], preserve_sparsity=True)
        result = rectify(z, self.graph, self.atn, config)
        self.assertEqual(result.z[6, 1], 0.0)
        self.assertNotEqual(result.z[6, 0], z[6, 0])

    def test_non_finite_node_keeps_its_row(self):
        z = self.z.copy()
        z[7] = np.nan
        result = rectify(z, self.graph, self.atn, RectifyConfig(epsilon=0.01))
        self.assertEqual(result.failed, [7])
        self.assertTrue(np.all(np.isnan(result.z[7])))
        self.assertFalse(np.array_equal(result.z[5], z[5]))
        self.assertNotIn(7, result.log_likelihood_after())

    def test_explicit_targets(self):
        result = rectify(self.z, self.graph, self.atn, RectifyConfig(targets=[2, 2, 0]))
        self.assertEqual(result.targets, [0, 2])
        with self.assertRaises(ContractError):
            rectify(self.z, self.graph, self.atn, RectifyConfig(targets=[8]))

    def test_invalid_config(self):
        with self.assertRaises(ConfigError):
            RectifyConfig(epsilon=0.0)
        with self.assertRaises(ConfigError):
            RectifyConfig(iterations=-1)


def block_attribute_decoder(k: int, block: int) -> AtnParams:
    """Decoder where community ``c`` switches on the ``c``-th block of attributes."""
    u = np.full((k, k * block), -3.0)
    for community in range(k):
        u[community, community * block:(community + 1) * block] = 6.0
    return AtnParams(
        t=Parameter("atn.T", np.eye(k), trainable=False),
        u=Parameter("atn.U", u, trainable=False),
        w_q=Parameter("atn.W_q", np.eye(k), trainable=False),
        w_k=Parameter("atn.W_k", np.eye(k), trainable=False))


class TestRectifiedLinkPrediction(unittest.TestCase):
    def test_isolated_nodes_are_linked_to_their_community(self):
        b_true = planted_blockmodel(4, 4.0, -4.0)
        instance = generate(
            200, 4, SpikeSlabPrior(0.3, 1.0, 0.5), b_true, block_attribute_decoder(4, 16),
            seed=0)
        single = np.flatnonzero(instance.c_true.sum(axis=1) == 1)
        targets = single[:20]
        z = instance.z_true.copy()
        # targets lost their edges: their rows are uninformative
        z[targets] = 0.25

        n = instance.graph.n
        adjacency = np.zeros((n, n), dtype=bool)
        adjacency[instance.graph.edges[:, 0], instance.graph.edges[:, 1]] = True
        adjacency |= adjacency.T
        rows, cols = np.triu_indices(n, k=1)
        incident = np.isin(rows, targets) | np.isin(cols, targets)
        pairs = np.stack([rows[incident], cols[incident]], axis=1)
        linked = adjacency[pairs[:, 0], pairs[:, 1]]
        positives, negatives = pairs[linked], pairs[~linked]

        before = isolated_link_report(z, b_true, positives, negatives, targets)
        result = rectify(
            z, instance.graph, instance.atn_true,
            RectifyConfig(epsilon=0.01, iterations=100, targets=targets))
        after = isolated_link_report(result.z, b_true, positives, negatives, targets)
        self.assertEqual(result.failed, [])
        self.assertGreater(after["auc"], 0.75)
        self.assertGreaterEqual(after["auc"], before["auc"] + 0.2)


if __name__ == '__main__':
    unittest.main()
