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

from dataclasses import dataclass
from typing import Any, Dict, Iterable, Optional

import numpy as np
from scipy.stats import rankdata

from norad.autodiff.ops import Sigmoid
from norad.errors import ContractError, DimensionError


HITS_AT = (10, 50, 100)


@dataclass
class ScoredEdges:
    """
    Node pairs with their scores and binary labels (1 for edges, 0 for non-edges).
    """
    edges: np.ndarray
    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.scores = np.asarray(self.scores, dtype=np.float64).reshape(-1)
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if not self.edges.shape[0] == self.scores.shape[0] == self.labels.shape[0]:
            raise DimensionError(
                f"Lengths differ: {self.edges.shape[0]} edges, {self.scores.shape[0]} scores, "
                f"{self.labels.shape[0]} labels")
        if np.any((self.labels != 0) & (self.labels != 1)):
            raise ContractError("Labels must be 0 or 1")

    @classmethod
    def from_scores(cls, scores: Iterable[float], labels: Iterable[int]) -> "ScoredEdges":
        """Scored pairs without endpoints; the position of every score is its edge id."""
        scores = np.asarray(list(scores), dtype=np.float64)
        edges = np.stack([np.arange(scores.size), np.arange(scores.size)], axis=1)
        return cls(edges=edges, scores=scores, labels=np.asarray(list(labels)))

    @classmethod
    def from_split(
            cls,
            positive_edges: np.ndarray,
            negative_edges: np.ndarray,
            positive_scores: np.ndarray,
            negative_scores: np.ndarray) -> "ScoredEdges":
        return cls(
            edges=np.concatenate([
                np.asarray(positive_edges).reshape(-1, 2),
                np.asarray(negative_edges).reshape(-1, 2)]),
            scores=np.concatenate([positive_scores, negative_scores]),
            labels=np.concatenate([
                np.ones(len(positive_scores), dtype=np.int64),
                np.zeros(len(negative_scores), dtype=np.int64)]))

    def check_both_classes(self) -> None:
        positives = int(self.labels.sum())
        if positives == 0 or positives == self.labels.size:
            raise ContractError(
                f"At least one positive and one negative are required, got {positives} "
                f"positives out of {self.labels.size}")


def score_edges(z: np.ndarray, b: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """
    Edge probabilities ``sigmoid(z_iᵀ B z_j)``, averaged over the two orientations of every
    pair.

    Raises:
        IndexError: if a node id is out of range.
    """
    z = np.asarray(z, dtype=np.float64)
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size > 0 and (edges.min() < 0 or edges.max() >= z.shape[0]):
        raise IndexError(f"Node ids must lie in [0, {z.shape[0]})")
    left, right = z[edges[:, 0]], z[edges[:, 1]]
    forward = np.einsum("ij,ij->i", left @ b, right)
    reverse = np.einsum("ij,ij->i", right @ b, left)
    return 0.5 * (Sigmoid.forward(forward) + Sigmoid.forward(reverse))


def roc_auc(scored: ScoredEdges) -> float:
    """
    Probability that a random positive outranks a random negative, ties counting 1/2,
    computed from average (mid) ranks.
    """
    scored.check_both_classes()
    ranks = rankdata(scored.scores, method="average")
    positives = scored.labels == 1
    num_pos = int(positives.sum())
    num_neg = scored.labels.size - num_pos
    rank_sum = float(ranks[positives].sum())
    return (rank_sum - num_pos * (num_pos + 1) / 2.0) / (num_pos * num_neg)


def average_precision(scored: ScoredEdges) -> float:
    """
    Step-wise average precision: the mean over positives of the precision at their rank.
    Equal scores are ordered by edge endpoints, then by position.
    """
    scored.check_both_classes()
    order = np.lexsort((
        np.arange(scored.scores.size), scored.edges[:, 1], scored.edges[:, 0], -scored.scores))
    labels = scored.labels[order]
    hits = np.cumsum(labels)
    ranks = np.arange(1, labels.size + 1)
    return float(np.sum((hits / ranks)[labels == 1]) / labels.sum())


def hits_at_k(pos_scores: np.ndarray, neg_scores: np.ndarray, k: int) -> float:
    """
    Fraction of positives scored strictly above the ``k``-th highest negative.

    Raises:
        ContractError: if ``k < 1`` or there are fewer than ``k`` negatives.
    """
    pos_scores = np.asarray(pos_scores, dtype=np.float64)
    neg_scores = np.asarray(neg_scores, dtype=np.float64)
    if k < 1:
        raise ContractError(f"k must be >= 1, got {k}")
    if neg_scores.size < k:
        raise ContractError(f"Hits@{k} requires at least {k} negatives, got {neg_scores.size}")
    if pos_scores.size == 0:
        raise ContractError("Hits@K requires at least one positive")
    threshold = np.sort(neg_scores)[::-1][k - 1]
    return float(np.mean(pos_scores > threshold))


def link_prediction_report(
        z: np.ndarray,
        b: np.ndarray,
        positive_edges: np.ndarray,
        negative_edges: np.ndarray,
        hits_at: Iterable[int] = HITS_AT) -> Dict[str, Any]:
    """
    AUC, AP and Hits@K of held-out pairs. Hits@K values whose ``k`` exceeds the number of
    negatives are omitted.
    """
    pos_scores = score_edges(z, b, positive_edges)
    neg_scores = score_edges(z, b, negative_edges)
    scored = ScoredEdges.from_split(positive_edges, negative_edges, pos_scores, neg_scores)
    return {
        "auc": roc_auc(scored),
        "ap": average_precision(scored),
        "hits": {
            str(k): hits_at_k(pos_scores, neg_scores, k)
            for k in hits_at if k <= neg_scores.size},
        "num_positive": int(pos_scores.size),
        "num_negative": int(neg_scores.size),
    }


def touching(edges: np.ndarray, nodes: Iterable[int]) -> np.ndarray:
    """Boolean mask of the pairs with at least one endpoint in ``nodes``."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    nodes = np.asarray(list(nodes), dtype=np.int64)
    return np.isin(edges[:, 0], nodes) | np.isin(edges[:, 1], nodes)


def isolated_link_report(
        z: np.ndarray,
        b: np.ndarray,
        positive_edges: np.ndarray,
        negative_edges: np.ndarray,
        isolated: Iterable[int]) -> Optional[Dict[str, Any]]:
    """
    AUC and AP restricted to the held-out pairs incident to isolated nodes, or ``None`` when
    these pairs do not contain both classes.
    """
    isolated = list(isolated)
    positive_edges = np.asarray(positive_edges, dtype=np.int64).reshape(-1, 2)
    negative_edges = np.asarray(negative_edges, dtype=np.int64).reshape(-1, 2)
    positives = positive_edges[touching(positive_edges, isolated)]
    negatives = negative_edges[touching(negative_edges, isolated)]
    if positives.shape[0] == 0 or negatives.shape[0] == 0:
        return None
    pos_scores = score_edges(z, b, positives)
    neg_scores = score_edges(z, b, negatives)
    scored = ScoredEdges.from_split(positives, negatives, pos_scores, neg_scores)
    return {
        "auc": roc_auc(scored),
        "ap": average_precision(scored),
        "num_positive": int(positives.shape[0]),
        "num_negative": int(negatives.shape[0]),
    }
