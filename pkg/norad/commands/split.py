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

import norad
from norad.commands.common import GRAPH_DIR, REPORT_FILE, SPLIT_FILE, EXIT_OK, RunManifest, \
    add_graph_arguments, fraction, input_paths, load_input_graph, run, setup_output, write_json
from norad.graph.split import DEFAULT_TRAIN_RATIO, DEFAULT_VAL_FRACTION, graph_statistics, \
    save_split, split_edges
from norad.graph.store import write_graph


logging.basicConfig(
    format='%(asctime)s | %(levelname)s | %(name)s | %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S',
    level=logging.INFO,
    force=True
)
LOGGER = logging.getLogger('norad.commands.split')


def main(args: argparse.Namespace, manifest: RunManifest) -> int:
    """
    Split the edges of a graph into training edges and validation/test pairs, and write the
    graph, the split manifest and the isolated-node statistics of the training graph.
    """
    manifest.record(
        {"train_ratio": args.train_ratio, "val_fraction": args.val_fraction},
        input_paths(args), seed=args.seed)
    graph = load_input_graph(args)
    out = setup_output(args.out)
    split = split_edges(graph, args.train_ratio, args.val_fraction, args.seed)
    graph_dir = os.path.join(out, GRAPH_DIR)
    write_graph(graph, graph_dir)
    save_split(split, os.path.join(out, SPLIT_FILE))
    report = {
        **graph_statistics(split),
        "num_edges": graph.num_edges,
        "num_attributes": graph.num_attributes,
        "num_val": int(len(split.val_pos)),
        "num_test": int(len(split.test_pos)),
        "split_manifest_hash": split.manifest_hash(),
    }
    write_json(os.path.join(out, REPORT_FILE), report)
    LOGGER.info(
        f"{report['num_isolated_nodes']} isolated nodes "
        f"({report['isolated_percentage']:.2f}%) contributing "
        f"{report['contributed_edges']} held-out edges")
    manifest.outputs = [graph_dir, SPLIT_FILE, REPORT_FILE]
    return EXIT_OK


def cli_main():
    """
    Edge split command.

    Typical usage from the command line::

        $ norad_split --features cora.content --edges cora.cites --train-ratio 0.85 \\
            --seed 0 --out splits/cora-85
    """
    LOGGER.info(f"norad version: {norad.__version__}")
    parser = argparse.ArgumentParser("norad_split")
    add_graph_arguments(parser)
    parser.add_argument(
        "--train-ratio", type=fraction, default=DEFAULT_TRAIN_RATIO,
        help=f"Fraction of the edges kept for training. Default: {DEFAULT_TRAIN_RATIO}.")
    parser.add_argument(
        "--val-fraction", type=fraction, default=DEFAULT_VAL_FRACTION,
        help="Fraction of the removed edges used for validation (the rest is the test set). "
             "Fractions such as 1/3 are accepted. Default: 1/3.")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=str, required=True, help="Output directory.")
    sys.exit(run(main, parser.parse_args(), "split"))


if __name__ == "__main__":
    cli_main()
