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


import argparse
import json
import os
import shutil
import sys
import time
import unittest
from datetime import datetime, timezone
from unittest import mock

import numpy as np

from norad.commands import evaluate, gradcheck, rectify, split, synth, topics, train
from norad.commands.common import EXIT_COMPATIBILITY_ERROR, EXIT_INPUT_ERROR, \
    EXIT_INTERRUPTED, EXIT_NUMERIC_ERROR, EXIT_OK, MANIFEST_FILE, REPORT_FILE, exit_code, run
from norad.errors import CompatibilityError, ConfigError, NumericError
from norad.graph.store import load_graph, write_graph
from norad.logger import setup_trace_logger
from norad.synthgen import generate_preset
from norad.training import checkpoint
from uts.utils import TemporaryDirectoryMixin, random_graph


TRAIN_FLAGS = [
    "--k", "4", "--d-prime", "8", "--d-dprime", "4", "--outer-rounds", "2",
    "--t-e", "2", "--t-m", "2", "--learning-rate", "0.01"]


def read_json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


class TestExitCodes(TemporaryDirectoryMixin, unittest.TestCase):
    def test_mapping(self):
        self.assertEqual(exit_code(ConfigError("bad")), EXIT_INPUT_ERROR)
        self.assertEqual(exit_code(FileNotFoundError("missing")), EXIT_INPUT_ERROR)
        self.assertEqual(exit_code(ValueError("bad value")), EXIT_INPUT_ERROR)
        self.assertEqual(exit_code(KeyError("column")), EXIT_INPUT_ERROR)
        self.assertEqual(exit_code(CompatibilityError("old")), EXIT_COMPATIBILITY_ERROR)
        self.assertEqual(exit_code(NumericError("nan", term="edge")), EXIT_NUMERIC_ERROR)
        self.assertEqual(exit_code(KeyboardInterrupt()), EXIT_INTERRUPTED)
        with self.assertRaises(RuntimeError):
            exit_code(RuntimeError("unexpected"))

    def test_run(self):
        def failing(error):
            def main(args, manifest):
                raise error
            return main

        self.assertEqual(run(lambda args, manifest: EXIT_OK, None, "noop"), EXIT_OK)
        self.assertEqual(run(failing(KeyboardInterrupt()), None), EXIT_INTERRUPTED)
        with self.assertLogs('norad.commands', level='ERROR') as logs:
            code = run(failing(NumericError("nan", term="edge", breakdown={"edge": None})), None)
        self.assertEqual(code, EXIT_NUMERIC_ERROR)
        self.assertTrue(any("breakdown" in line for line in logs.output))
        with self.assertLogs('norad.commands', level='ERROR'):
            self.assertEqual(run(failing(ValueError("bad value")), None), EXIT_INPUT_ERROR)
            self.assertEqual(run(failing(KeyError("column")), None), EXIT_INPUT_ERROR)
        with self.assertRaises(RuntimeError):
            run(failing(RuntimeError("not mapped")), None)

    def test_manifest_written_once_whatever_the_outcome(self):
        def main(args, manifest):
            manifest.record({"value": 1}, [os.path.join(self.tmp_dir, "missing")], seed=5)
            raise ConfigError("bad")

        out = os.path.join(self.tmp_dir, "out")
        with self.assertLogs('norad.commands', level='ERROR'):
            code = run(main, argparse.Namespace(out=out), "failing")
        self.assertEqual(code, EXIT_INPUT_ERROR)
        self.assertEqual(os.listdir(out), [MANIFEST_FILE])
        manifest = read_json(os.path.join(out, MANIFEST_FILE))
        self.assertEqual(manifest["command"], "failing")
        self.assertEqual(manifest["exit_code"], EXIT_INPUT_ERROR)
        self.assertEqual(manifest["seed"], 5)
        self.assertEqual(list(manifest["inputs"].values()), [None])
        self.assertIsNotNone(manifest["finished"])

        with self.assertRaises(RuntimeError):
            run(mock.Mock(side_effect=RuntimeError("crash")), argparse.Namespace(out=out), "x")
        self.assertEqual(read_json(os.path.join(out, MANIFEST_FILE))["exit_code"], 1)


class CommandTestCase(TemporaryDirectoryMixin, unittest.TestCase):
    def tearDown(self):
        setup_trace_logger(None)
        super().tearDown()

    def path(self, *names):
        return os.path.join(self.tmp_dir, *names)

    def call(self, module, *argv):
        with mock.patch.object(sys, "argv", [module.__name__, *argv]), \
                self.assertRaises(SystemExit) as ctx:
            module.cli_main()
        return ctx.exception.code


class TestSynthCommand(CommandTestCase):
    def test_tiny_preset(self):
        out = self.path("data")
        self.assertEqual(self.call(synth, "--preset", "tiny", "--seed", "0", "--out", out), 0)
        graph = load_graph(out)
        self.assertEqual(graph.n, 12)
        self.assertEqual(graph.num_attributes, 8)
        manifest = read_json(os.path.join(out, MANIFEST_FILE))
        self.assertEqual(manifest["command"], "synth")
        self.assertEqual(manifest["seed"], 0)
        self.assertIn(REPORT_FILE, manifest["outputs"])

    def test_same_seed_same_files(self):
        for name in ("first", "second"):
            self.call(synth, "--preset", "tiny", "--seed", "3", "--out", self.path(name))
        for name in ("edges.tsv", "content.tsv"):
            with open(self.path("first", name)) as a, open(self.path("second", name)) as b:
                self.assertEqual(a.read(), b.read())

    def test_manifest_started_before_the_work(self):
        def slow_generate(*args, **kwargs):
            time.sleep(1.0)
            return generate_preset(*args, **kwargs)

        invoked = datetime.now(timezone.utc)
        with mock.patch.object(synth, "generate_preset", side_effect=slow_generate):
            self.call(synth, "--preset", "tiny", "--out", self.path("data"))
        manifest = read_json(os.path.join(self.path("data"), MANIFEST_FILE))
        started = datetime.fromisoformat(manifest["started"])
        finished = datetime.fromisoformat(manifest["finished"])
        self.assertLess((started - invoked).total_seconds(), 0.5)
        self.assertGreaterEqual((finished - started).total_seconds(), 1.0)
        self.assertEqual(manifest["exit_code"], EXIT_OK)


class TestPipeline(CommandTestCase):
    def setUp(self):
        super().setUp()
        write_graph(
            random_graph(n=30, num_attributes=8, seed=2, num_classes=3), self.path("data"))
        self.split_dir = self.path("split")
        self.assertEqual(self.call(
            split, "--graph-dir", self.path("data"), "--train-ratio", "0.7",
            "--seed", "0", "--out", self.split_dir), 0)
        self.run_dir = self.path("run")
        self.assertEqual(
            self.call(train, "--split", self.split_dir, "--out", self.run_dir, *TRAIN_FLAGS), 0)
        self.best = os.path.join(self.run_dir, train.CHECKPOINTS_DIR, "best")

    def test_split_outputs(self):
        report = read_json(os.path.join(self.split_dir, REPORT_FILE))
        self.assertEqual(report["num_test"] + report["num_val"] + report["num_train_edges"],
                         report["num_edges"])
        manifest = read_json(os.path.join(self.split_dir, MANIFEST_FILE))
        self.assertEqual(list(manifest["inputs"]), [self.path("data")])

    def test_train_outputs(self):
        for name in ("last", "best", train.FINAL_CHECKPOINT):
            self.assertTrue(os.path.isfile(os.path.join(
                self.run_dir, train.CHECKPOINTS_DIR, name, checkpoint.MANIFEST_FILE)))
        report = read_json(os.path.join(self.run_dir, REPORT_FILE))
        self.assertEqual(report["rounds"], 2)
        self.assertIsNotNone(report["best_val_auc"])
        with open(os.path.join(self.run_dir, train.TRACE_FILE)) as f:
            records = [json.loads(line) for line in f]
        self.assertTrue(records)

    def test_same_seed_identical_checkpoints(self):
        rerun = self.path("rerun")
        self.assertEqual(
            self.call(train, "--split", self.split_dir, "--out", rerun, *TRAIN_FLAGS), 0)
        for name in ("last", "best", train.FINAL_CHECKPOINT):
            for filename in (checkpoint.MANIFEST_FILE, checkpoint.BLOB_FILE):
                paths = [os.path.join(directory, train.CHECKPOINTS_DIR, name, filename)
                         for directory in (self.run_dir, rerun)]
                with open(paths[0], "rb") as a, open(paths[1], "rb") as b:
                    self.assertEqual(a.read(), b.read(), paths[0])

    def test_evaluate(self):
        out = self.path("eval")
        self.assertEqual(self.call(
            evaluate, "--checkpoint", self.best, "--split", self.split_dir,
            "--out", out, "--restarts", "2"), 0)
        z = np.load(os.path.join(out, evaluate.Z_FILE))
        b = np.loadtxt(os.path.join(out, evaluate.B_FILE), delimiter=",")
        self.assertEqual(z.shape, (30, 4))
        self.assertEqual(b.shape, (4, 4))
        report = read_json(os.path.join(out, REPORT_FILE))
        self.assertTrue(0.0 <= report["auc"] <= 1.0)
        self.assertTrue(0.0 <= report["nmi"] <= 1.0)

    def test_rectify_then_evaluate(self):
        out = self.path("rectified")
        self.assertEqual(self.call(
            rectify, "--checkpoint", self.best, "--split", self.split_dir, "--out", out,
            "--iters", "5", "--epsilon", "0.01"), 0)
        z_file = os.path.join(out, rectify.Z_FILE)
        self.assertEqual(np.load(z_file).shape, (30, 4))
        report = read_json(os.path.join(out, REPORT_FILE))
        self.assertEqual(report["iterations"], 5)
        self.assertEqual(self.call(
            evaluate, "--checkpoint", self.best, "--split", self.split_dir,
            "--out", self.path("eval"), "--z", z_file, "--restarts", "1"), 0)

    def test_topics(self):
        out = self.path("topics")
        self.assertEqual(self.call(
            topics, "--checkpoint", self.best, "--split", self.split_dir, "--out", out,
            "--all", "--samples", "100", "--members", "--max-df", "1.0"), 0)
        reports = read_json(os.path.join(out, REPORT_FILE))["topics"]
        self.assertEqual(len(reports), 4)
        self.assertIn("members", reports[0])

    def test_unsupported_checkpoint_version(self):
        edited = self.path("edited")
        shutil.copytree(self.best, edited)
        manifest_path = os.path.join(edited, checkpoint.MANIFEST_FILE)
        manifest = read_json(manifest_path)
        manifest["version"] = checkpoint.CHECKPOINT_FORMAT_VERSION + 1
        with open(manifest_path, "w", encoding="utf-8") as f:
            json.dump(manifest, f)
        self.assertEqual(self.call(
            evaluate, "--checkpoint", edited, "--split", self.split_dir,
            "--out", self.path("eval")), EXIT_COMPATIBILITY_ERROR)

    def test_unknown_config_key(self):
        config = self.path("config.yaml")
        with open(config, "w") as f:
            f.write("beta: 1.0\n")
        self.assertEqual(self.call(
            train, "--split", self.split_dir, "--out", self.path("other"),
            "--config", config), EXIT_INPUT_ERROR)
        manifest = read_json(os.path.join(self.path("other"), MANIFEST_FILE))
        self.assertEqual(manifest["exit_code"], EXIT_INPUT_ERROR)
        self.assertEqual(manifest["command"], "train")
        self.assertIn(config, manifest["inputs"])


class TestInputErrors(CommandTestCase):
    def test_missing_edge_file(self):
        self.assertEqual(self.call(
            split, "--edges", self.path("missing.tsv"), "--features", self.path("f.tsv"),
            "--out", self.path("split")), EXIT_INPUT_ERROR)

    def test_graph_arguments_required(self):
        self.assertEqual(
            self.call(split, "--out", self.path("split")), EXIT_INPUT_ERROR)


class TestGradcheckCommand(CommandTestCase):
    def test_tiny_scale(self):
        out = self.path("gradcheck")
        self.assertEqual(self.call(gradcheck, "--seed", "0", "--out", out), EXIT_OK)
        report = read_json(os.path.join(out, REPORT_FILE))
        self.assertTrue(report["passed"])
        self.assertLess(report["max"], gradcheck.TOLERANCE)


if __name__ == '__main__':
    unittest.main()
