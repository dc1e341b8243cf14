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
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional

import numpy as np

from norad.config import rng_stream
from norad.errors import ContractError, DimensionError, ParseError
from norad.model.atn import AtnParams, attribute_probs_numpy


LOGGER = logging.getLogger('norad.topics')

DEFAULT_NUM_SAMPLES = 10000
DEFAULT_MAX_DOCUMENT_FREQUENCY = 0.2
DEFAULT_TOP = 10
DEFAULT_MEMBERS_THRESHOLD = 0.5
SAMPLE_CHUNK = 2048


@dataclass
class TopicReport:
    """
    Attribute distribution of a community.

    Attributes:
        community (int): community index.
        mean_activation (np.ndarray): mean attribute probability over the samples (length D).
        top (List[int]): kept attributes with the highest mean activation, in descending order.
        names (List[str]): name of every attribute.
        members (List[int], optional): nodes belonging to the community.
        member_labels (Dict[str, int], optional): label histogram of the members.
    """
    community: int
    mean_activation: np.ndarray
    top: List[int]
    names: List[str]
    members: Optional[List[int]] = None
    member_labels: Optional[Dict[str, int]] = field(default=None)

    def to_dict(self) -> Dict[str, Any]:
        report = {
            "community": self.community,
            "top_words": [
                {
                    "attribute": int(a),
                    "name": self.names[a],
                    "mean_activation": float(self.mean_activation[a]),
                } for a in self.top],
        }
        if self.members is not None:
            report["members"] = self.members
            report["member_labels"] = self.member_labels
        return report

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def topic_distribution(
        k: int, num_samples: int, seed: int, atn: AtnParams) -> np.ndarray:
    """
    Mean attribute probabilities of community ``k``: every sample is ``z = onehot(k) ⊙ v``
    with ``v`` standard normal, drawn from the ``topics.<k>`` stream of ``seed``.

    Raises:
        IndexError: if ``k`` is not a community index.
        ContractError: if ``num_samples < 1``.
    """
    if not 0 <= k < atn.k:
        raise IndexError(f"Community {k} out of range [0, {atn.k})")
    if num_samples < 1:
        raise ContractError(f"num_samples must be >= 1, got {num_samples}")
    strengths = rng_stream(seed, f"topics.{k}").standard_normal(num_samples)
    total = np.zeros(atn.num_attributes)
    for start in range(0, num_samples, SAMPLE_CHUNK):
        chunk = strengths[start:start + SAMPLE_CHUNK]
        z = np.zeros((chunk.size, atn.k))
        z[:, k] = chunk
        total += attribute_probs_numpy(z, atn).sum(axis=0)
    return total / num_samples


def attribute_filter(
        features: np.ndarray,
        max_document_frequency: float = DEFAULT_MAX_DOCUMENT_FREQUENCY,
        stop_list: Iterable[str] = (),
        names: Optional[List[str]] = None) -> np.ndarray:
    """
    Boolean mask of the attributes kept in topic reports: those present in at most
    ``max_document_frequency`` of the nodes and whose name is not in ``stop_list``.
    """
    features = np.asarray(features)
    keep = features.mean(axis=0) <= max_document_frequency
    stop = set(stop_list)
    if stop:
        if names is None:
            raise ContractError("A stop-list requires attribute names")
        keep &= np.array([name not in stop for name in names])
    return keep


def top_attributes(
        mean_activation: np.ndarray,
        keep: Optional[np.ndarray] = None,
        top: int = DEFAULT_TOP) -> List[int]:
    """Indices of the ``top`` kept attributes by descending mean activation (index on ties)."""
    candidates = np.arange(mean_activation.size)
    if keep is not None:
        candidates = candidates[keep]
    order = np.lexsort((candidates, -mean_activation[candidates]))
    return [int(a) for a in candidates[order][:top]]


def community_members(
        z: np.ndarray, k: int, threshold: float = DEFAULT_MEMBERS_THRESHOLD) -> List[int]:
    """Nodes whose deterministic representation exceeds ``threshold`` on community ``k``."""
    if not 0 <= k < z.shape[1]:
        raise IndexError(f"Community {k} out of range [0, {z.shape[1]})")
    return [int(i) for i in np.flatnonzero(z[:, k] > threshold)]


def label_histogram(
        members: List[int], labels: Optional[np.ndarray],
        label_names: Optional[List[str]]) -> Optional[Dict[str, int]]:
    if labels is None:
        return None
    counts = Counter(label_names[labels[i]] for i in members)
    return dict(sorted(counts.items()))


def attribute_names(num_attributes: int, vocabulary_path: Optional[str] = None) -> List[str]:
    """
    Attribute names from a vocabulary file (one name per line), or ``attr_<index>``.

    Raises:
        ParseError: if the vocabulary does not have one name per attribute.
    """
    if vocabulary_path is None:
        return [f"attr_{i}" for i in range(num_attributes)]
    with open(vocabulary_path, "r", encoding="utf-8") as f:
        names = [line.rstrip("\n") for line in f if line.strip()]
    if len(names) != num_attributes:
        raise ParseError(
            f"Vocabulary {vocabulary_path} has {len(names)} names for {num_attributes} "
            f"attributes")
    return names


def topic_report(
        k: int,
        atn: AtnParams,
        names: List[str],
        num_samples: int = DEFAULT_NUM_SAMPLES,
        seed: int = 0,
        keep: Optional[np.ndarray] = None,
        top: int = DEFAULT_TOP) -> TopicReport:
    if len(names) != atn.num_attributes:
        raise DimensionError(f"{len(names)} names for {atn.num_attributes} attributes")
    mean = topic_distribution(k, num_samples, seed, atn)
    LOGGER.debug(f"Community {k}: mean activation in [{mean.min():.4f}, {mean.max():.4f}]")
    return TopicReport(
        community=k, mean_activation=mean, top=top_attributes(mean, keep, top), names=names)
