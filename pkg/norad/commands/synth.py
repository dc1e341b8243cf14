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
from collections import Counter
from dataclasses import asdict

import norad
from norad.commands.common import EXIT_OK, REPORT_FILE, RunManifest, run, setup_output, \
    write_json
from norad.config import read_yaml
from norad.graph.store import CONTENT_FILE, EDGES_FILE, LABELS_FILE
from norad.synthgen import PLANTED_FILE, PRESETS, generate_preset, resolve_preset, \
    write_instance


logging.basicConfig(
    format='%(asctime)s | %(levelname)s | %(name)s | %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S',
    level=logging.INFO,
    force=True
)
LOGGER = logging.getLogger('norad.commands.synth')


def main(args: argparse.Namespace, manifest: RunManifest) -> int:
    """
    Sample a planted instance and write it in the graph file formats, with the latent state
    in ``planted.json``.
    """
    manifest.record({"preset": args.preset}, [args.params], args.seed)
    preset = resolve_preset(read_yaml(args.params) if args.params else args.preset)
    seed = preset.seed if args.seed is None else args.seed
    manifest.config, manifest.seed = asdict(preset), seed
    instance = generate_preset(preset, seed)
    out = setup_output(args.out)
    write_instance(instance, out)
    graph = instance.graph
    labels = Counter(graph.label_names[label] for label in graph.labels)
    report = {
        "num_nodes": graph.n,
        "num_edges": graph.num_edges,
        "density": 2 * graph.num_edges / max(graph.n * (graph.n - 1), 1),
        "num_attributes": graph.num_attributes,
        "attribute_density": float(graph.features.mean()),
        "labels": dict(sorted(labels.items())),
    }
    write_json(os.path.join(out, REPORT_FILE), report)
    manifest.outputs = [EDGES_FILE, CONTENT_FILE, LABELS_FILE, PLANTED_FILE, REPORT_FILE]
    return EXIT_OK


def cli_main():
    """
    Synthetic graph command.

    Typical usage from the command line::

        $ norad_synth --preset recovery --seed 0 --out data/recovery
    """
    LOGGER.info(f"norad version: {norad.__version__}")
    parser = argparse.ArgumentParser("norad_synth")
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=sorted(PRESETS), help="Named instance parameters.")
    group.add_argument(
        "--params", type=str,
        help="YAML/JSON file with the fields of norad.synthgen.SynthPreset.")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", type=str, required=True, help="Output directory.")
    sys.exit(run(main, parser.parse_args(), "synth"))


if __name__ == "__main__":
    cli_main()
