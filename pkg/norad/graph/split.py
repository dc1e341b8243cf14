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

import hashlib
import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Set, Tuple

import numpy as np

from norad.config import rng_stream
from norad.errors import CapacityError, CompatibilityError, ContractError
from norad.graph.adjacency import isolated_nodes
from norad.graph.store import AttributedGraph, canonical_edges


LOGGER = logging.getLogger('norad.graph.split')

SPLIT_FORMAT_VERSION = 1
# Kipf & Welling protocol: 85% train, 5% validation, 10% test
DEFAULT_TRAIN_RATIO = 0.85
DEFAULT_VAL_FRACTION = 1.0 / 3.0


@dataclass
class EdgeSplit:
    """
    Partition of the edges of a graph for link prediction.

    The positive lists partition the original edges; negatives are non-edges of the full graph,
    pairwise disjoint, with as many validation (test) negatives as validation (test) positives.
    """
    n: int
    train_edges: np.ndarray
    val_pos: np.ndarray
    val_neg: np.ndarray
    test_pos: np.ndarray
    test_neg: np.ndarray
    train_ratio: float
    val_fraction: float
    seed: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": SPLIT_FORMAT_VERSION,
            "n": self.n,
            "train_ratio": self.train_ratio,
            "val_fraction": self.val_fraction,
            "seed": self.seed,
            "train_edges": self.train_edges.tolist(),
            "val_pos": self.val_pos.tolist(),
            "val_neg": self.val_neg.tolist(),
            "test_pos": self.test_pos.tolist(),
            "test_neg": self.test_neg.tolist(),
        }

    @classmethod
    def from_dict(cls, content: Dict[str, Any]) -> "EdgeSplit":
        if content.get("version") != SPLIT_FORMAT_VERSION:
            raise CompatibilityError(
                f"Split manifest version {content.get('version')} is not supported "
                f"(expected {SPLIT_FORMAT_VERSION})")

        def pairs(key):
            return np.array(content[key], dtype=np.int64).reshape(-1, 2)

        return cls(
            n=content["n"],
            train_edges=pairs("train_edges"),
            val_pos=pairs("val_pos"),
            val_neg=pairs("val_neg"),
            test_pos=pairs("test_pos"),
            test_neg=pairs("test_neg"),
            train_ratio=content["train_ratio"],
            val_fraction=content["val_fraction"],
            seed=content["seed"])

    def manifest_hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")).hexdigest()


def save_split(split: EdgeSplit, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(split.to_dict(), f)


def load_split(path: str) -> EdgeSplit:
    with open(path, "r", encoding="utf-8") as f:
        return EdgeSplit.from_dict(json.load(f))


def split_sizes(num_edges: int, train_ratio: float, val_fraction: float) -> Tuple[int, int, int]:
    """
    Number of train, validation and test positives: ``floor(train_ratio · m)`` edges are kept
    for training, ``floor(val_fraction · removed)`` of the removed ones go to validation and the
    remaining ones to test.
    """
    num_train = int(math.floor(train_ratio * num_edges + 1e-9))
    removed = num_edges - num_train
    num_val = int(math.floor(val_fraction * removed + 1e-9))
    return num_train, num_val, removed - num_val


def _sample_negatives(
        n: int,
        count: int,
        forbidden: Set[Tuple[int, int]],
        rng: np.random.Generator) -> np.ndarray:
    """Rejection-sample ``count`` distinct non-edges, adding them to ``forbidden``."""
    drawn = []
    attempts = 0
    max_attempts = 100 * count + 1000
    while len(drawn) < count and attempts < max_attempts:
        batch = max(2 * (count - len(drawn)), 16)
        candidates = rng.integers(0, n, size=(batch, 2))
        attempts += batch
        for i, j in candidates:
            if i == j:
                continue
            pair = (int(min(i, j)), int(max(i, j)))
            if pair in forbidden:
                continue
            forbidden.add(pair)
            drawn.append(pair)
            if len(drawn) == count:
                break
    if len(drawn) < count:
        # dense graphs: fall back to sampling from the enumerated complement
        LOGGER.warning("Rejection sampling exhausted, enumerating the non-edges")
        remaining = [
            (i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in forbidden]
        chosen = rng.choice(len(remaining), size=count - len(drawn), replace=False)
        for index in sorted(chosen):
            forbidden.add(remaining[index])
            drawn.append(remaining[index])
    return np.array(drawn, dtype=np.int64).reshape(-1, 2)


def split_edges(
        graph: AttributedGraph,
        train_ratio: float = DEFAULT_TRAIN_RATIO,
        val_fraction: float = DEFAULT_VAL_FRACTION,
        seed: int = 0) -> EdgeSplit:
    """
    Randomly split the edges into train/validation/test positives (sizes by
    :func:`split_sizes`) and sample as many negatives for validation and test.

    Negatives are uniform non-edges of the full graph, never repeated across the two sets.

    Raises:
        ContractError: if the ratios are out of range.
        CapacityError: if the graph has fewer non-edges than the requested negatives.
    """
    if not 0 < train_ratio < 1:
        raise ContractError(f"train_ratio must be in (0, 1), got {train_ratio}")
    if not 0 <= val_fraction <= 1:
        raise ContractError(f"val_fraction must be in [0, 1], got {val_fraction}")
    edges = canonical_edges(graph.edges)
    num_train, num_val, num_test = split_sizes(len(edges), train_ratio, val_fraction)
    capacity = graph.n * (graph.n - 1) // 2 - len(edges)
    if num_val + num_test > capacity:
        raise CapacityError(
            f"The graph has {capacity} non-edges, {num_val + num_test} negatives requested")
    rng = rng_stream(seed, "split")
    permuted = edges[rng.permutation(len(edges))]
    train = permuted[:num_train]
    val_pos = permuted[num_train:num_train + num_val]
    test_pos = permuted[num_train + num_val:]
    forbidden = {(int(i), int(j)) for i, j in edges}
    val_neg = _sample_negatives(graph.n, num_val, forbidden, rng)
    test_neg = _sample_negatives(graph.n, num_test, forbidden, rng)
    LOGGER.info(
        f"Split {len(edges)} edges into {num_train} train, {num_val} validation and "
        f"{num_test} test positives")
    return EdgeSplit(
        n=graph.n,
        train_edges=canonical_edges(train),
        val_pos=val_pos,
        val_neg=val_neg,
        test_pos=test_pos,
        test_neg=test_neg,
        train_ratio=train_ratio,
        val_fraction=val_fraction,
        seed=seed)


def graph_statistics(split: EdgeSplit) -> Dict[str, Any]:
    """
    Isolated-node statistics of the training graph: number and percentage of nodes without
    training edges, and number of held-out edges incident to them ("contributed edges").
    """
    isolated = set(isolated_nodes(split.train_edges, split.n))
    removed = np.concatenate([split.val_pos, split.test_pos]).reshape(-1, 2)
    contributed = sum(1 for i, j in removed if int(i) in isolated or int(j) in isolated)
    return {
        "num_nodes": split.n,
        "num_train_edges": int(len(split.train_edges)),
        "num_isolated_nodes": len(isolated),
        "isolated_percentage": 100.0 * len(isolated) / split.n,
        "contributed_edges": int(contributed),
    }
