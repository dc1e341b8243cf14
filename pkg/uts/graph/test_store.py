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


import json
import os
import unittest

import numpy as np

from norad.errors import ConsistencyError, DomainError, ParseError
from norad.graph.store import AttributedGraph, LABELS_FILE, NODE_IDS_FILE, canonical_edges, \
    load_edge_list, load_features, load_graph, load_graph_files, write_graph
from uts.utils import TemporaryDirectoryMixin, write_lines


class TestEdgeList(TemporaryDirectoryMixin, unittest.TestCase):
    def test_duplicates_and_self_loops_dropped(self):
        path = write_lines(self.tmp_dir, "edges.tsv", [
            "# comment", "0\t1", "1\t0", "2\t2", "", "3 1"])
        loaded = load_edge_list(path, n=4)
        np.testing.assert_array_equal(loaded.edges, [[0, 1], [1, 3]])
        self.assertEqual(loaded.num_duplicates, 1)
        self.assertEqual(loaded.num_self_loops, 1)

    def test_malformed_line(self):
        path = write_lines(self.tmp_dir, "edges.tsv", ["0\t1", "0\t1\t2"])
        with self.assertRaises(ParseError) as ctx:
            load_edge_list(path)
        self.assertEqual(ctx.exception.line_number, 2)

    def test_non_integer_id(self):
        path = write_lines(self.tmp_dir, "edges.tsv", ["0\tx"])
        with self.assertRaises(ParseError):
            load_edge_list(path)

    def test_out_of_range_id(self):
        path = write_lines(self.tmp_dir, "edges.tsv", ["0\t5"])
        with self.assertRaises(ConsistencyError):
            load_edge_list(path, n=5)

    def test_canonical_edges(self):
        edges = canonical_edges([[3, 1], [1, 3], [2, 2], [0, 4]])
        np.testing.assert_array_equal(edges, [[0, 4], [1, 3]])
        self.assertEqual(canonical_edges([]).shape, (0, 2))


class TestFeatures(TemporaryDirectoryMixin, unittest.TestCase):
    def test_string_ids_mapped_in_file_order(self):
        path = write_lines(self.tmp_dir, "x.tsv", ["node_b\t1\t0", "node_a\t0\t1"])
        features, names, index = load_features(path)
        np.testing.assert_array_equal(features, [[1, 0], [0, 1]])
        self.assertEqual(names, ["node_b", "node_a"])
        self.assertEqual(index["node_a"], 1)

    def test_ragged_rows(self):
        path = write_lines(self.tmp_dir, "x.tsv", ["a\t1\t0", "b\t1"])
        with self.assertRaises(ParseError):
            load_features(path)

    def test_non_binary_value(self):
        path = write_lines(self.tmp_dir, "x.tsv", ["a\t1\t2"])
        with self.assertRaises(DomainError):
            load_features(path)

    def test_duplicate_node(self):
        path = write_lines(self.tmp_dir, "x.tsv", ["a\t1", "a\t0"])
        with self.assertRaises(ConsistencyError):
            load_features(path)


class TestGraphFiles(TemporaryDirectoryMixin, unittest.TestCase):
    def test_content_format_with_labels(self):
        content = write_lines(self.tmp_dir, "cora.content", [
            "31336\t0\t1\t1\tNeural_Networks",
            "1061127\t1\t0\t0\tRule_Learning",
            "1106406\t0\t0\t1\tNeural_Networks"])
        cites = write_lines(self.tmp_dir, "cora.cites", ["31336\t1061127", "1106406\t31336"])
        graph = load_graph_files(cites, content)
        self.assertEqual(graph.n, 3)
        np.testing.assert_array_equal(graph.edges, [[0, 1], [0, 2]])
        self.assertEqual(graph.label_names, ["Neural_Networks", "Rule_Learning"])
        np.testing.assert_array_equal(graph.labels, [0, 1, 0])

    def test_unknown_node_in_edges(self):
        features = write_lines(self.tmp_dir, "x.tsv", ["a\t1", "b\t0"])
        edges = write_lines(self.tmp_dir, "e.tsv", ["a\tc"])
        with self.assertRaises(ConsistencyError):
            load_graph_files(edges, features)

    def test_missing_label(self):
        features = write_lines(self.tmp_dir, "x.tsv", ["a\t1", "b\t0"])
        edges = write_lines(self.tmp_dir, "e.tsv", ["a\tb"])
        labels = write_lines(self.tmp_dir, "y.tsv", ["a\tfoo"])
        with self.assertRaises(ConsistencyError):
            load_graph_files(edges, features, labels)

    def test_write_then_load(self):
        graph = AttributedGraph(
            n=4,
            edges=np.array([[2, 0], [1, 3]]),
            features=np.array([[1, 0], [0, 1], [1, 1], [0, 0]]),
            labels=np.array([1, 0, 1, 0]),
            label_names=["x", "y"],
            node_names=["n0", "n1", "n2", "n3"])
        directory = os.path.join(self.tmp_dir, "graph")
        write_graph(graph, directory)
        with open(os.path.join(directory, NODE_IDS_FILE)) as f:
            self.assertEqual(json.load(f), ["n0", "n1", "n2", "n3"])
        loaded = load_graph(directory)
        np.testing.assert_array_equal(loaded.edges, [[0, 2], [1, 3]])
        np.testing.assert_array_equal(loaded.features, graph.features)
        np.testing.assert_array_equal(loaded.labels, graph.labels)
        self.assertEqual(loaded.label_names, ["x", "y"])
        self.assertEqual(loaded.node_names, graph.node_names)

    def test_label_order_survives(self):
        for labels, names in (([0, 1], ["zeta", "alpha"]), ([0, 2, 2], ["c0", "c1", "c2"])):
            graph = AttributedGraph(
                n=len(labels), edges=np.array([[0, 1]]), features=np.ones((len(labels), 2)),
                labels=np.array(labels), label_names=names)
            directory = os.path.join(self.tmp_dir, "_".join(names))
            write_graph(graph, directory)
            loaded = load_graph(directory)
            np.testing.assert_array_equal(loaded.labels, labels)
            self.assertEqual(loaded.label_names, names)

    def test_label_missing_from_names(self):
        graph = AttributedGraph(
            n=2, edges=np.array([[0, 1]]), features=np.ones((2, 2)),
            labels=np.array([0, 1]), label_names=["a", "b"])
        write_graph(graph, self.tmp_dir)
        with open(os.path.join(self.tmp_dir, LABELS_FILE), "w") as f:
            json.dump(["a"], f)
        with self.assertRaises(ConsistencyError):
            load_graph(self.tmp_dir)

    def test_unlabeled_graph(self):
        graph = AttributedGraph(n=2, edges=np.array([[0, 1]]), features=np.ones((2, 3)))
        write_graph(graph, self.tmp_dir)
        loaded = load_graph(self.tmp_dir)
        self.assertIsNone(loaded.labels)
        self.assertIsNone(loaded.node_names)
        self.assertFalse(os.path.exists(os.path.join(self.tmp_dir, LABELS_FILE)))


class TestAttributedGraph(unittest.TestCase):
    def test_feature_rows_must_match(self):
        with self.assertRaises(ConsistencyError):
            AttributedGraph(n=3, edges=np.zeros((0, 2)), features=np.zeros((2, 4)))

    def test_edges_out_of_range(self):
        with self.assertRaises(ConsistencyError):
            AttributedGraph(n=2, edges=np.array([[0, 2]]), features=np.zeros((2, 1)))

    def test_non_binary_features(self):
        with self.assertRaises(DomainError):
            AttributedGraph(n=1, edges=np.zeros((0, 2)), features=np.array([[0.5]]))


if __name__ == '__main__':
    unittest.main()
