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
import logging
import os
import sys
from typing import Any, Dict, Optional

import numpy as np

import norad
from norad.commands.common import EXIT_OK, REPORT_FILE, RunManifest, load_trained_model, run, \
    setup_output, write_json
from norad.config import config_hash
from norad.errors import DimensionError
from norad.graph.adjacency import isolated_nodes
from norad.graph.split import EdgeSplit
from norad.graph.store import AttributedGraph
from norad.metrics.clustering import DEFAULT_RESTARTS, clustering_report
from norad.metrics.link_prediction import isolated_link_report, link_prediction_report


logging.basicConfig(
    format='%(asctime)s | %(levelname)s | %(name)s | %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S',
    level=logging.INFO,
    force=True
)
LOGGER = logging.getLogger('norad.commands.evaluate')

Z_FILE = "z.npy"
B_FILE = "B.csv"


def evaluate_representation(
        z: np.ndarray,
        b: np.ndarray,
        graph: AttributedGraph,
        split: EdgeSplit,
        seed: int = 0,
        restarts: int = DEFAULT_RESTARTS) -> Dict[str, Any]:
    """
    Link prediction on the test pairs (overall and restricted to isolated nodes) and, for
    labeled graphs, k-means clustering of all the nodes.
    """
    if z.shape[0] != graph.n:
        raise DimensionError(f"Representation has {z.shape[0]} rows for {graph.n} nodes")
    report = link_prediction_report(z, b, split.test_pos, split.test_neg)
    report["isolated"] = isolated_link_report(
        z, b, split.test_pos, split.test_neg, isolated_nodes(split.train_edges, split.n))
    if graph.labels is not None:
        report.update(clustering_report(z, graph.labels, seed=seed, restarts=restarts))
    else:
        report.update({"nmi": None, "acc": None})
    return report


def main(args: argparse.Namespace, manifest: RunManifest) -> int:
    """
    Evaluate a checkpoint on the test pairs of a split and export the deterministic
    representation (``z.npy``) and the blockmodel (``B.csv``).
    """
    manifest.record(
        {"representation": args.representation, "restarts": args.restarts},
        [args.checkpoint, args.split, args.z], args.seed)
    checkpoint, graph, split, model = load_trained_model(args.checkpoint, args.split)
    out = setup_output(args.out)
    if args.z is not None:
        z = np.load(args.z)
        LOGGER.info(f"Evaluating the representation in {args.z}")
    else:
        z = model.representation(args.representation)
    seed = checkpoint.config.seed if args.seed is None else args.seed
    manifest.config["checkpoint_config"] = checkpoint.config.to_dict()
    manifest.seed = seed
    report = evaluate_representation(z, model.b, graph, split, seed=seed, restarts=args.restarts)
    report["config_hash"] = config_hash(checkpoint.config)
    report["split_manifest_hash"] = split.manifest_hash()
    LOGGER.info(_summary(report))

    np.save(os.path.join(out, Z_FILE), z)
    np.savetxt(os.path.join(out, B_FILE), model.b, delimiter=",")
    write_json(os.path.join(out, REPORT_FILE), report)
    manifest.outputs = [Z_FILE, B_FILE, REPORT_FILE]
    return EXIT_OK


def _summary(report: Dict[str, Any]) -> str:
    parts = [f"AUC {report['auc']:.4f}", f"AP {report['ap']:.4f}"]
    parts += [f"Hits@{k} {v:.4f}" for k, v in report["hits"].items()]
    isolated: Optional[Dict[str, Any]] = report["isolated"]
    if isolated is not None:
        parts.append(f"isolated AUC {isolated['auc']:.4f}")
    if report.get("nmi") is not None:
        parts += [f"NMI {report['nmi']:.4f}", f"ACC {report['acc']:.4f}"]
    return ", ".join(parts)


def cli_main():
    """
    Evaluation command.

    Typical usage from the command line::

        $ norad_eval --checkpoint runs/cora-85/checkpoints/best --split splits/cora-85 \\
            --out runs/cora-85/eval
    """
    LOGGER.info(f"norad version: {norad.__version__}")
    parser = argparse.ArgumentParser("norad_eval")
    parser.add_argument("--checkpoint", type=str, required=True, help="Checkpoint directory.")
    parser.add_argument(
        "--split", type=str, required=True, help="Output directory of norad_split.")
    parser.add_argument("--out", type=str, required=True, help="Output directory.")
    parser.add_argument(
        "--z", type=str, default=None,
        help="Evaluate this n × K .npy representation (e.g. the output of norad_rectify) "
             "instead of the one computed from the checkpoint.")
    parser.add_argument(
        "--representation", choices=["threshold", "soft"], default="threshold",
        help="Deterministic representation: thresholded (default) or η ⊙ μ.")
    parser.add_argument(
        "--seed", type=int, default=None, help="k-means seed. Default: the training seed.")
    parser.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    sys.exit(run(main, parser.parse_args(), "eval"))


if __name__ == "__main__":
    cli_main()
