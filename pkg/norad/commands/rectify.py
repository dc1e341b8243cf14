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

import numpy as np

import norad
from norad.commands.common import EXIT_OK, REPORT_FILE, RunManifest, load_trained_model, run, \
    setup_output, write_json
from norad.graph.adjacency import isolated_nodes
from norad.graph.store import AttributedGraph
from norad.logger import log_trace, setup_trace_logger
from norad.metrics.link_prediction import isolated_link_report
from norad.rectifier import RectifyConfig, rectify


logging.basicConfig(
    format='%(asctime)s | %(levelname)s | %(name)s | %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S',
    level=logging.INFO,
    force=True
)
LOGGER = logging.getLogger('norad.commands.rectify')

Z_FILE = "z_rectified.npy"


def _read_targets(path: str):
    with open(path, "r", encoding="utf-8") as f:
        return [int(line.split()[0]) for line in f if line.strip() and not line.startswith("#")]


def main(args: argparse.Namespace, manifest: RunManifest) -> int:
    """
    Rectify the representations of the isolated nodes (or of the given targets) and report
    their attribute log-likelihood and the isolated-node link prediction before and after.
    """
    manifest.record(
        {"epsilon": args.epsilon, "iterations": args.iters,
         "preserve_sparsity": args.preserve_sparsity},
        [args.checkpoint, args.split, args.targets])
    checkpoint, graph, split, model = load_trained_model(args.checkpoint, args.split)
    manifest.config["checkpoint_config"] = checkpoint.config.to_dict()
    manifest.seed = checkpoint.config.seed
    out = setup_output(args.out)
    if args.trace_file is not None:
        setup_trace_logger(args.trace_file)
    config = RectifyConfig(
        epsilon=args.epsilon, iterations=args.iters,
        targets=_read_targets(args.targets) if args.targets is not None else None,
        preserve_sparsity=args.preserve_sparsity)
    z = model.representation("threshold")
    train_graph = AttributedGraph(graph.n, split.train_edges, graph.features)
    result = rectify(z, train_graph, model.atn, config)
    for node, values in result.trace.items():
        log_trace({"node": node, "log_likelihood": values})

    isolated = isolated_nodes(split.train_edges, split.n)
    before = isolated_link_report(z, model.b, split.test_pos, split.test_neg, isolated)
    after = isolated_link_report(result.z, model.b, split.test_pos, split.test_neg, isolated)
    ll_before = result.log_likelihood_before()
    ll_after = result.log_likelihood_after()
    report = {
        "num_targets": len(result.targets),
        "failed": result.failed,
        "epsilon": config.epsilon,
        "iterations": config.iterations,
        "log_likelihood": {
            str(node): {"before": ll_before[node], "after": ll_after.get(node)}
            for node in result.targets},
        "mean_log_likelihood_before": float(np.mean(list(ll_before.values())))
        if ll_before else None,
        "mean_log_likelihood_after": float(np.mean(list(ll_after.values())))
        if ll_after else None,
        "isolated_before": before,
        "isolated_after": after,
    }
    if before is not None and after is not None:
        LOGGER.info(f"Isolated-node AUC {before['auc']:.4f} -> {after['auc']:.4f}")
    np.save(os.path.join(out, Z_FILE), result.z)
    write_json(os.path.join(out, REPORT_FILE), report)
    manifest.outputs = [Z_FILE, REPORT_FILE] + ([args.trace_file] if args.trace_file else [])
    return EXIT_OK


def cli_main():
    """
    Rectification command.

    Typical usage from the command line::

        $ norad_rectify --checkpoint runs/cora-85/checkpoints/best --split splits/cora-85 \\
            --iters 50 --epsilon 0.001 --out runs/cora-85/rectify
    """
    LOGGER.info(f"norad version: {norad.__version__}")
    defaults = RectifyConfig()
    parser = argparse.ArgumentParser("norad_rectify")
    parser.add_argument("--checkpoint", type=str, required=True, help="Checkpoint directory.")
    parser.add_argument(
        "--split", type=str, required=True, help="Output directory of norad_split.")
    parser.add_argument("--out", type=str, required=True, help="Output directory.")
    parser.add_argument(
        "--iters", type=int, default=defaults.iterations,
        help=f"Gradient ascent steps per node. Default: {defaults.iterations}.")
    parser.add_argument(
        "--epsilon", type=float, default=defaults.epsilon,
        help=f"Step size. Default: {defaults.epsilon}.")
    parser.add_argument(
        "--targets", type=str, default=None,
        help="File with one node id per line. Default: the isolated nodes of the training "
             "graph.")
    parser.add_argument(
        "--preserve-sparsity", action="store_true",
        help="Keep the zero coordinates of the representations at zero.")
    parser.add_argument(
        "--trace-file", type=str, default=None,
        help="JSON-lines file receiving the log-likelihood trace of every node.")
    sys.exit(run(main, parser.parse_args(), "rectify"))


if __name__ == "__main__":
    cli_main()
