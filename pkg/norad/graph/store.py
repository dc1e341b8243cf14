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
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Set, Tuple

import numpy as np

from norad.errors import ConsistencyError, DomainError, ParseError


LOGGER = logging.getLogger('norad.graph.store')

EDGES_FILE = "edges.tsv"
CONTENT_FILE = "content.tsv"
NODE_IDS_FILE = "node_ids.json"
LABELS_FILE = "labels.json"


@dataclass
class LoadedEdges:
    """
    Result of reading an edge list.

    Attributes:
        edges (np.ndarray): ``(m, 2)`` array of undirected edges ``(i, j)`` with ``i < j``,
            sorted lexicographically and without duplicates.
        num_duplicates (int): lines dropped because the edge was already present (in either
            orientation).
        num_self_loops (int): lines dropped because both endpoints coincide.
    """
    edges: np.ndarray
    num_duplicates: int = 0
    num_self_loops: int = 0


@dataclass
class AttributedGraph:
    """
    Undirected graph with binary node attributes.

    Attributes:
        n (int): number of nodes.
        edges (np.ndarray): ``(m, 2)`` int64 array, ``i < j``, no self-loops, no duplicates.
        features (np.ndarray): ``(n, D)`` binary matrix (uint8).
        labels (np.ndarray, optional): class id of every node.
        label_names (List[str], optional): name of every class id.
        node_names (List[str], optional): original identifier of every node.
    """
    n: int
    edges: np.ndarray
    features: np.ndarray
    labels: Optional[np.ndarray] = None
    label_names: Optional[List[str]] = None
    node_names: Optional[List[str]] = None

    def __post_init__(self):
        self.edges = canonical_edges(self.edges)
        if self.edges.size > 0:
            if self.edges.min() < 0 or self.edges.max() >= self.n:
                raise ConsistencyError(f"Edge endpoints must lie in [0, {self.n})")
        if self.features.shape[0] != self.n:
            raise ConsistencyError(
                f"Feature matrix has {self.features.shape[0]} rows but the graph has "
                f"{self.n} nodes")
        if not np.isin(self.features, (0, 1)).all():
            raise DomainError("Feature entries must be binary")
        self.features = self.features.astype(np.uint8)
        if self.labels is not None and len(self.labels) != self.n:
            raise ConsistencyError(f"Expected {self.n} labels, got {len(self.labels)}")

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def num_attributes(self) -> int:
        return int(self.features.shape[1])

    def edge_set(self) -> Set[Tuple[int, int]]:
        return {(int(i), int(j)) for i, j in self.edges}


def canonical_edges(edges) -> np.ndarray:
    """Orient every pair as ``i < j``, drop self-loops and duplicates, sort."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    edges = np.sort(edges, axis=1)
    edges = edges[edges[:, 0] != edges[:, 1]]
    if edges.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    return np.unique(edges, axis=0)


def _data_lines(path: str) -> Iterator[Tuple[int, List[str]]]:
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t") if "\t" in line else line.split()
            yield line_number, [field.strip() for field in fields]


def _resolve_node(
        token: str,
        line_number: int,
        n: Optional[int],
        node_index: Optional[Dict[str, int]]) -> int:
    if node_index is not None:
        if token not in node_index:
            raise ConsistencyError(f"line {line_number}: unknown node id `{token}`")
        return node_index[token]
    try:
        node = int(token)
    except ValueError:
        raise ParseError(f"node id `{token}` is not an integer", line_number)
    if node < 0 or (n is not None and node >= n):
        raise ConsistencyError(
            f"line {line_number}: node id {node} out of range for {n} nodes")
    return node


def load_edge_list(
        path: str,
        n: Optional[int] = None,
        node_index: Optional[Dict[str, int]] = None) -> LoadedEdges:
    """
    Read an undirected edge list, one ``src<TAB>dst`` pair per line (``#`` starts a comment).

    Args:
        path (str): file to read.
        n (int, optional): number of nodes, when known (e.g. features loaded first); ids must be
            smaller.
        node_index (Dict[str, int], optional): mapping from string ids to dense ids. When given,
            ids are resolved through it instead of being parsed as integers.

    Raises:
        ParseError: if a line does not contain two ids or an id is not an integer.
        ConsistencyError: if an id is out of range or unknown.
    """
    pairs = []
    seen = set()
    duplicates = 0
    self_loops = 0
    for line_number, fields in _data_lines(path):
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, found {len(fields)}", line_number)
        i = _resolve_node(fields[0], line_number, n, node_index)
        j = _resolve_node(fields[1], line_number, n, node_index)
        if i == j:
            self_loops += 1
            continue
        pair = (min(i, j), max(i, j))
        if pair in seen:
            duplicates += 1
            continue
        seen.add(pair)
        pairs.append(pair)
    if self_loops > 0 or duplicates > 0:
        LOGGER.warning(
            f"{path}: dropped {self_loops} self-loops and {duplicates} duplicate edges")
    return LoadedEdges(canonical_edges(pairs), duplicates, self_loops)


def _parse_binary(token: str, line_number: int) -> int:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"feature value `{token}` is not a number", line_number)
    if value not in (0.0, 1.0):
        raise DomainError(f"line {line_number}: feature value {token} is not binary")
    return int(value)


def _read_rows(path: str, with_label: bool):
    node_names = []
    node_index = {}
    rows = []
    labels = []
    width = None
    for line_number, fields in _data_lines(path):
        min_fields = 3 if with_label else 2
        if len(fields) < min_fields:
            raise ParseError(f"expected at least {min_fields} fields", line_number)
        values = fields[1:-1] if with_label else fields[1:]
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise ParseError(
                f"ragged row with {len(values)} attributes, expected {width}", line_number)
        node_id = fields[0]
        if node_id in node_index:
            raise ConsistencyError(f"line {line_number}: duplicate node id `{node_id}`")
        node_index[node_id] = len(node_names)
        node_names.append(node_id)
        rows.append([_parse_binary(v, line_number) for v in values])
        if with_label:
            labels.append(fields[-1])
    features = np.array(rows, dtype=np.uint8).reshape(len(rows), width or 0)
    return node_names, node_index, features, labels


def load_features(path: str) -> Tuple[np.ndarray, List[str], Dict[str, int]]:
    """
    Read a ``node_id<TAB>b_1<TAB>…<TAB>b_D`` feature file.

    Returns:
        Tuple[np.ndarray, List[str], Dict[str, int]]: the ``n × D`` binary matrix, the node
        names in file order and the mapping name → dense id.

    Raises:
        ParseError: on ragged rows or non-numeric values.
        DomainError: on non-binary values.
        ConsistencyError: on duplicate node ids.
    """
    node_names, node_index, features, _ = _read_rows(path, with_label=False)
    return features, node_names, node_index


def encode_labels(raw_labels: List[str]) -> Tuple[np.ndarray, List[str]]:
    label_names = sorted(set(raw_labels))
    label_ids = {name: i for i, name in enumerate(label_names)}
    return np.array([label_ids[label] for label in raw_labels], dtype=np.int64), label_names


def load_cora_content(path: str) -> AttributedGraph:
    """
    Read a Cora-style content file (``node_id<TAB>b_1…b_D<TAB>label``) into an edgeless
    :class:`AttributedGraph`; edges are added by :func:`load_graph_files`.
    """
    node_names, _, features, raw_labels = _read_rows(path, with_label=True)
    labels, label_names = encode_labels(raw_labels)
    return AttributedGraph(
        n=len(node_names),
        edges=np.zeros((0, 2), dtype=np.int64),
        features=features,
        labels=labels,
        label_names=label_names,
        node_names=node_names)


def load_labels(path: str, node_index: Dict[str, int]) -> Tuple[np.ndarray, List[str]]:
    """Read a ``node_id<TAB>label`` file covering every node."""
    raw = [None] * len(node_index)
    for line_number, fields in _data_lines(path):
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, found {len(fields)}", line_number)
        raw[_resolve_node(fields[0], line_number, None, node_index)] = fields[1]
    missing = [i for i, label in enumerate(raw) if label is None]
    if missing:
        raise ConsistencyError(f"{len(missing)} nodes have no label in {path}")
    return encode_labels(raw)


def load_graph_files(
        edges_path: str,
        features_path: str,
        labels_path: Optional[str] = None,
        content_format: Optional[bool] = None) -> AttributedGraph:
    """
    Load an attributed graph from an edge list and a feature (or Cora content) file.

    Args:
        edges_path (str): edge list.
        features_path (str): feature file, or content file with a trailing label column.
        labels_path (str, optional): separate ``node_id<TAB>label`` file.
        content_format (bool, optional): whether the feature file has a trailing label column.
            When omitted, files with the ``.content`` suffix are treated as content files.
    """
    if content_format is None:
        content_format = Path(features_path).suffix == ".content"
    if content_format:
        graph = load_cora_content(features_path)
        node_index = {name: i for i, name in enumerate(graph.node_names)}
    else:
        features, node_names, node_index = load_features(features_path)
        graph = AttributedGraph(len(node_names), np.zeros((0, 2)), features, node_names=node_names)
    if labels_path is not None:
        graph.labels, graph.label_names = load_labels(labels_path, node_index)
    graph.edges = load_edge_list(edges_path, graph.n, node_index).edges
    LOGGER.info(
        f"Loaded graph with {graph.n} nodes, {graph.num_edges} edges and "
        f"{graph.num_attributes} attributes")
    return graph


def write_graph(graph: AttributedGraph, directory: str) -> None:
    """
    Write the graph in the package file formats: ``edges.tsv`` with dense ids,
    ``content.tsv`` (features plus label column, ``-`` when unlabeled), ``labels.json`` with
    the ordered class names of a labeled graph and, when the nodes have original identifiers,
    ``node_ids.json``.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / EDGES_FILE, "w", encoding="utf-8") as f:
        for i, j in graph.edges:
            f.write(f"{i}\t{j}\n")
    with open(out / CONTENT_FILE, "w", encoding="utf-8") as f:
        for node in range(graph.n):
            label = graph.label_names[graph.labels[node]] if graph.labels is not None else "-"
            values = "\t".join(str(int(v)) for v in graph.features[node])
            f.write(f"{node}\t{values}\t{label}\n")
    if graph.labels is not None:
        with open(out / LABELS_FILE, "w", encoding="utf-8") as f:
            json.dump(list(graph.label_names), f)
    if graph.node_names is not None:
        with open(out / NODE_IDS_FILE, "w", encoding="utf-8") as f:
            json.dump(graph.node_names, f)


def _decode_labels(raw_labels: List[str], label_names: List[str]) -> np.ndarray:
    label_ids = {name: i for i, name in enumerate(label_names)}
    if len(label_ids) != len(label_names):
        raise ConsistencyError(f"Duplicate class names in {LABELS_FILE}")
    unknown = sorted(set(raw_labels) - set(label_ids))
    if unknown:
        raise ConsistencyError(f"Labels {unknown[:5]} are missing from {LABELS_FILE}")
    return np.array([label_ids[label] for label in raw_labels], dtype=np.int64)


def load_graph(directory: str) -> AttributedGraph:
    """
    Read a graph written by :func:`write_graph`. Class ids follow ``labels.json`` when it is
    present, and the sorted class names otherwise.
    """
    base = Path(directory)
    node_names, _, features, raw_labels = _read_rows(str(base / CONTENT_FILE), with_label=True)
    labels, label_names = None, None
    if (base / LABELS_FILE).exists():
        with open(base / LABELS_FILE, "r", encoding="utf-8") as f:
            label_names = [str(name) for name in json.load(f)]
        labels = _decode_labels(raw_labels, label_names)
    elif any(label != "-" for label in raw_labels):
        labels, label_names = encode_labels(raw_labels)
    original_names = None
    if (base / NODE_IDS_FILE).exists():
        with open(base / NODE_IDS_FILE, "r", encoding="utf-8") as f:
            original_names = json.load(f)
    edges = load_edge_list(str(base / EDGES_FILE), len(node_names)).edges
    return AttributedGraph(
        n=len(node_names),
        edges=edges,
        features=features,
        labels=labels,
        label_names=label_names,
        node_names=original_names)
