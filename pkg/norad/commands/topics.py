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
from norad.commands.common import EXIT_OK, REPORT_FILE, RunManifest, load_trained_model, run, \
    setup_output, write_json
from norad.topics import DEFAULT_MAX_DOCUMENT_FREQUENCY, DEFAULT_MEMBERS_THRESHOLD, \
    DEFAULT_NUM_SAMPLES, DEFAULT_TOP, attribute_filter, attribute_names, community_members, \
    label_histogram, topic_report


logging.basicConfig(
    format='%(asctime)s | %(levelname)s | %(name)s | %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S',
    level=logging.INFO,
    force=True
)
LOGGER = logging.getLogger('norad.commands.topics')


def _read_stop_list(path):
    if path is None:
        return []
    with open(path, "r", encoding="utf-8") as f:
        return [line.strip() for line in f if line.strip()]


def main(args: argparse.Namespace, manifest: RunManifest) -> int:
    """
    Extract the attribute distribution ("topic") of one or all the communities, optionally
    with the nodes belonging to them.
    """
    manifest.record(
        {"community": args.community, "all": args.all, "samples": args.samples,
         "top": args.top, "max_df": args.max_df, "members": args.members,
         "members_threshold": args.members_threshold},
        [args.checkpoint, args.split, args.vocabulary, args.stop_list], args.seed)
    checkpoint, graph, split, model = load_trained_model(args.checkpoint, args.split)
    out = setup_output(args.out)
    names = attribute_names(graph.num_attributes, args.vocabulary)
    keep = attribute_filter(
        graph.features, args.max_df, _read_stop_list(args.stop_list), names)
    LOGGER.info(f"{int(keep.sum())} of {graph.num_attributes} attributes kept in the reports")
    communities = range(checkpoint.config.k) if args.all else [args.community]
    z = model.representation("threshold") if args.members else None
    seed = checkpoint.config.seed if args.seed is None else args.seed
    manifest.seed = seed
    reports = []
    for k in communities:
        report = topic_report(k, model.atn, names, args.samples, seed, keep, args.top)
        if z is not None:
            report.members = community_members(z, k, args.members_threshold)
            report.member_labels = label_histogram(
                report.members, graph.labels, graph.label_names)
        reports.append(report.to_dict())
        LOGGER.info(
            f"Community {k}: " + ", ".join(names[a] for a in report.top))
    write_json(os.path.join(out, REPORT_FILE), {"topics": reports})
    manifest.outputs = [REPORT_FILE]
    return EXIT_OK


def cli_main():
    """
    Topic extraction command.

    Typical usage from the command line::

        $ norad_topics --checkpoint runs/cora-85/checkpoints/best --split splits/cora-85 \\
            --all --samples 10000 --members --out runs/cora-85/topics
    """
    LOGGER.info(f"norad version: {norad.__version__}")
    parser = argparse.ArgumentParser("norad_topics")
    parser.add_argument("--checkpoint", type=str, required=True, help="Checkpoint directory.")
    parser.add_argument(
        "--split", type=str, required=True,
        help="Output directory of norad_split (attribute frequencies and labels).")
    parser.add_argument("--out", type=str, required=True, help="Output directory.")
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--community", type=int, help="Community index.")
    group.add_argument("--all", action="store_true", help="Report every community.")
    parser.add_argument(
        "--samples", type=int, default=DEFAULT_NUM_SAMPLES,
        help=f"Sampled representations per community. Default: {DEFAULT_NUM_SAMPLES}.")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--top", type=int, default=DEFAULT_TOP)
    parser.add_argument(
        "--max-df", type=float, default=DEFAULT_MAX_DOCUMENT_FREQUENCY,
        help="Drop attributes present in more than this fraction of the nodes. "
             f"Default: {DEFAULT_MAX_DOCUMENT_FREQUENCY}.")
    parser.add_argument("--stop-list", type=str, default=None, help="Attribute names to drop.")
    parser.add_argument(
        "--vocabulary", type=str, default=None,
        help="Attribute names, one per line. Default: attr_<index>.")
    parser.add_argument(
        "--members", action="store_true", help="List the nodes of every community.")
    parser.add_argument(
        "--members-threshold", type=float, default=DEFAULT_MEMBERS_THRESHOLD,
        help=f"Membership threshold on the representation. "
             f"Default: {DEFAULT_MEMBERS_THRESHOLD}.")
    sys.exit(run(main, parser.parse_args(), "topics"))


if __name__ == "__main__":
    cli_main()
