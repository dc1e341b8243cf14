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

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.cluster import KMeans
from sklearn.metrics import normalized_mutual_info_score

from norad.config import rng_stream
from norad.errors import ContractError, DimensionError


LOGGER = logging.getLogger('norad.metrics.clustering')

DEFAULT_RESTARTS = 10
MAX_ITERATIONS = 300


@dataclass
class ClusterAssignment:
    """
    Cluster id of every point.

    Attributes:
        labels (np.ndarray): ids in ``[0, count)``.
        count (int): number of clusters.
        inertia (float): sum of squared distances to the assigned centers.
    """
    labels: np.ndarray
    count: int
    inertia: float = 0.0

    def __post_init__(self):
        assert self.labels.size == 0 or \
            (0 <= self.labels.min() and self.labels.max() < self.count), \
            "Cluster ids must lie in [0, count)"


def kmeans(
        points: np.ndarray,
        k: int,
        seed: int = 0,
        max_iters: int = MAX_ITERATIONS,
        restarts: int = DEFAULT_RESTARTS) -> ClusterAssignment:
    """
    k-means++ seeded k-means with ``restarts`` independent initializations; the run with the
    lowest inertia is kept. The random state is drawn from the ``kmeans`` stream of ``seed``.

    Raises:
        ContractError: if ``k`` is not in ``[1, n]`` or ``restarts`` is not positive.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise DimensionError(f"Expected an n × d matrix, got shape {points.shape}")
    if not 1 <= k <= points.shape[0]:
        raise ContractError(f"k must be in [1, {points.shape[0]}], got {k}")
    if restarts < 1:
        raise ContractError(f"restarts must be positive, got {restarts}")
    random_state = int(rng_stream(seed, "kmeans").integers(np.iinfo(np.int32).max))
    model = KMeans(
        n_clusters=k, init="k-means++", n_init=restarts, max_iter=max_iters,
        random_state=random_state)
    labels = model.fit_predict(points)
    LOGGER.debug(f"k-means with k={k}: inertia {model.inertia_:.6f}, {model.n_iter_} iterations")
    return ClusterAssignment(
        labels=labels.astype(np.int64), count=k, inertia=float(model.inertia_))


def contingency_matrix(pred: np.ndarray, true: np.ndarray) -> np.ndarray:
    pred = np.asarray(pred).reshape(-1)
    true = np.asarray(true).reshape(-1)
    if pred.size != true.size:
        raise DimensionError(f"Label vectors differ in length: {pred.size} and {true.size}")
    if pred.size == 0:
        raise ContractError("Label vectors must not be empty")
    _, pred_ids = np.unique(pred, return_inverse=True)
    _, true_ids = np.unique(true, return_inverse=True)
    table = np.zeros((pred_ids.max() + 1, true_ids.max() + 1), dtype=np.int64)
    np.add.at(table, (pred_ids, true_ids), 1)
    return table


def nmi(pred: np.ndarray, true: np.ndarray) -> float:
    """
    Normalized mutual information with arithmetic-mean normalization. When both partitions
    have a single cluster the value is 1.
    """
    pred = np.asarray(pred).reshape(-1)
    true = np.asarray(true).reshape(-1)
    if pred.size != true.size:
        raise DimensionError(f"Label vectors differ in length: {pred.size} and {true.size}")
    if pred.size == 0:
        raise ContractError("Label vectors must not be empty")
    score = normalized_mutual_info_score(true, pred, average_method="arithmetic")
    return float(np.clip(score, 0.0, 1.0))


def hungarian_accuracy(pred: np.ndarray, true: np.ndarray) -> float:
    """Accuracy under the cluster-to-class matching that maximizes the matches."""
    table = contingency_matrix(pred, true)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum() / table.sum())


def clustering_report(
        z: np.ndarray, labels: np.ndarray, seed: int = 0, restarts: int = DEFAULT_RESTARTS):
    """k-means on ``z`` with as many clusters as classes, scored by NMI and matched accuracy."""
    num_classes = int(np.unique(labels).size)
    assignment = kmeans(z, num_classes, seed=seed, restarts=restarts)
    return {
        "nmi": nmi(assignment.labels, labels),
        "acc": hungarian_accuracy(assignment.labels, labels),
        "num_classes": num_classes,
        "inertia": assignment.inertia,
    }
