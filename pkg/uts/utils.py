import os
import tempfile
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from norad.config import TrainConfig
from norad.graph.store import AttributedGraph


CONFIGS_DIR = Path(__file__).parent.parent / 'config'


def write_lines(directory: str, name: str, lines: Iterable[str]) -> str:
    path = os.path.join(directory, name)
    with open(path, "w", encoding="utf-8") as f:
        for line in lines:
            f.write(line + "\n")
    return path


def random_graph(
        n: int = 12,
        num_attributes: int = 8,
        edge_probability: float = 0.3,
        seed: int = 0,
        num_classes: Optional[int] = None) -> AttributedGraph:
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < edge_probability, k=1)
    edges = np.argwhere(upper)
    features = (rng.random((n, num_attributes)) < 0.4).astype(np.uint8)
    labels, label_names = None, None
    if num_classes is not None:
        labels = rng.integers(num_classes, size=n)
        label_names = [f"class{i}" for i in range(num_classes)]
    return AttributedGraph(
        n=n, edges=edges, features=features, labels=labels, label_names=label_names)


def tiny_config(**overrides) -> TrainConfig:
    values = dict(k=4, d_prime=8, d_dprime=4, t_e=2, t_m=2, outer_rounds=3, learning_rate=0.01)
    values.update(overrides)
    return TrainConfig(**values)


class TemporaryDirectoryMixin:
    def setUp(self):
        super().setUp()
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp_dir = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()
        super().tearDown()
