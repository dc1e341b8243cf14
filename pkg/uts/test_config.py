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


import os
import unittest
from unittest import mock

from norad.config import TrainConfig, arithmetic_threads, config_hash, load_train_config, \
    read_yaml, rng_stream
from norad.errors import ConfigError
from uts.utils import CONFIGS_DIR, TemporaryDirectoryMixin, write_lines


class TestTrainConfig(TemporaryDirectoryMixin, unittest.TestCase):
    def test_defaults(self):
        config = TrainConfig()
        self.assertEqual((config.t_e, config.t_m, config.k), (10, 10, 256))
        self.assertEqual(config.learning_rate, 0.001)
        self.assertEqual(config.temperature_floor, 0.5)

    def test_invariants(self):
        for values in ({"alpha": -1.0}, {"gamma": -0.1}, {"t_e": 0}, {"learning_rate": 0.0},
                       {"decoder": "mlp"}, {"pos_weight": "half"}, {"prior_delta": 1.0},
                       {"anneal_fraction": 0.0}, {"anneal_fraction": 1.5}):
            with self.assertRaises(ConfigError):
                TrainConfig(**values)

    def test_no_attr_disables_attribute_weight(self):
        self.assertEqual(TrainConfig(alpha=3.0, decoder="no_attr").effective_alpha, 0.0)
        self.assertEqual(TrainConfig(alpha=3.0).effective_alpha, 3.0)

    def test_file_and_overrides(self):
        path = write_lines(self.tmp_dir, "train.yaml", ["alpha: 2.0", "k: 16"])
        config = load_train_config(path, {"k": 8, "seed": None})
        self.assertEqual((config.alpha, config.k, config.seed), (2.0, 8, 0))

    def test_unknown_key(self):
        path = write_lines(self.tmp_dir, "train.yaml", ["alpha: 2.0", "beta: 1"])
        with self.assertRaises(ConfigError):
            load_train_config(path)

    def test_read_yaml(self):
        self.assertEqual(read_yaml(write_lines(self.tmp_dir, "empty.yaml", [])), {})
        self.assertEqual(
            read_yaml(write_lines(self.tmp_dir, "train.json", ['{"k": 4}'])), {"k": 4})
        with self.assertRaises(ConfigError):
            read_yaml(write_lines(self.tmp_dir, "list.yaml", ["- 1", "- 2"]))

    def test_shipped_configs_are_valid(self):
        names = sorted(os.listdir(CONFIGS_DIR))
        self.assertIn("link_prediction.yaml", names)
        for name in names:
            load_train_config(os.path.join(CONFIGS_DIR, name))
        alpha = load_train_config(os.path.join(CONFIGS_DIR, "link_prediction_alpha.yaml"))
        self.assertEqual(alpha.alpha, 3.0)
        recovery = load_train_config(os.path.join(CONFIGS_DIR, "synthetic_recovery.yaml"))
        self.assertEqual((recovery.k, recovery.prior_u, recovery.anneal_fraction), (16, 1.0, 0.5))

    def test_hash(self):
        self.assertEqual(config_hash(TrainConfig()), config_hash(TrainConfig().to_dict()))
        self.assertNotEqual(config_hash(TrainConfig()), config_hash(TrainConfig(seed=1)))


class TestEnvironment(unittest.TestCase):
    def test_threads(self):
        with mock.patch.dict("os.environ", {"NORAD_THREADS": "4"}):
            self.assertEqual(arithmetic_threads(), 4)
        with mock.patch.dict("os.environ", {"NORAD_THREADS": "many"}):
            with self.assertRaises(ConfigError):
                arithmetic_threads()

    def test_streams_are_independent(self):
        self.assertEqual(rng_stream(3, "split").random(), rng_stream(3, "split").random())
        self.assertNotEqual(rng_stream(3, "split").random(), rng_stream(3, "init").random())
        self.assertNotEqual(rng_stream(3, "split").random(), rng_stream(4, "split").random())


if __name__ == '__main__':
    unittest.main()
