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
import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import norad
from norad.errors import CapacityError, CompatibilityError, ConfigError, ConsistencyError, \
    ContractError, DimensionError, DomainError, NumericError, ParseError
from norad.graph.split import EdgeSplit, load_split
from norad.graph.store import AttributedGraph, load_graph, load_graph_files
from norad.model.vgae import NoradModel
from norad.training.checkpoint import Checkpoint, load_checkpoint


LOGGER = logging.getLogger('norad.commands')

EXIT_OK = 0
EXIT_UNHANDLED = 1
EXIT_INPUT_ERROR = 2
EXIT_COMPATIBILITY_ERROR = 3
EXIT_NUMERIC_ERROR = 4
EXIT_INTERRUPTED = 130

INPUT_ERRORS = (
    ParseError, ConsistencyError, CapacityError, ConfigError, ContractError, DimensionError,
    DomainError, IndexError, KeyError, OSError, ValueError)

MANIFEST_FILE = "manifest.json"
REPORT_FILE = "report.json"
SPLIT_FILE = "split.json"
GRAPH_DIR = "graph"


def exit_code(error: BaseException) -> int:
    """Stable mapping from errors to process exit codes."""
    if isinstance(error, CompatibilityError):
        return EXIT_COMPATIBILITY_ERROR
    if isinstance(error, NumericError):
        return EXIT_NUMERIC_ERROR
    if isinstance(error, KeyboardInterrupt):
        return EXIT_INTERRUPTED
    if isinstance(error, INPUT_ERRORS):
        return EXIT_INPUT_ERROR
    raise error


def run(
        main: Callable[[argparse.Namespace, "RunManifest"], int],
        args: Optional[argparse.Namespace],
        command: Optional[str] = None) -> int:
    """
    Run a command, logging failures and turning them into exit codes.

    The run manifest is opened before ``main`` starts and written to the ``out`` directory of
    the arguments (when there is one) once the command is over, whatever its outcome.
    """
    manifest = RunManifest(command=command or main.__module__)
    code = EXIT_UNHANDLED
    try:
        code = main(args, manifest)
        return code
    except NumericError as e:
        LOGGER.error(f"Numeric failure: {e}")
        if e.breakdown:
            LOGGER.error(f"Term breakdown: {json.dumps(e.breakdown)}")
        code = exit_code(e)
        return code
    except KeyboardInterrupt as e:
        LOGGER.warning("Interrupted")
        code = exit_code(e)
        return code
    except (CompatibilityError, *INPUT_ERRORS) as e:
        LOGGER.error(f"{type(e).__name__}: {e}")
        code = exit_code(e)
        return code
    finally:
        out = getattr(args, "out", None)
        if out is not None:
            try:
                manifest.write(setup_output(out), code)
            except OSError as e:
                LOGGER.error(f"Cannot write the run manifest to {out}: {e}")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def file_sha256(path: str) -> str:
    """SHA-256 of a file, or of the sorted files of a directory (names included)."""
    digest = hashlib.sha256()
    if os.path.isdir(path):
        for root, dirs, files in os.walk(path):
            dirs.sort()
            for name in sorted(files):
                full = os.path.join(root, name)
                digest.update(os.path.relpath(full, path).encode("utf-8"))
                digest.update(bytes.fromhex(file_sha256(full)))
        return digest.hexdigest()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """
    Record of a command run: everything needed to regenerate its outputs.

    The manifest is created when the command starts; the command fills in its configuration,
    inputs and outputs as it goes, and :func:`run` writes it with the exit code at the end.
    """
    command: str
    config: Dict[str, Any] = field(default_factory=dict)
    inputs: Dict[str, Optional[str]] = field(default_factory=dict)
    seed: Optional[int] = None
    version: str = norad.__version__
    started: str = field(default_factory=_now)
    finished: Optional[str] = None
    exit_code: Optional[int] = None
    outputs: List[str] = field(default_factory=list)

    def record(
            self,
            config: Dict[str, Any],
            inputs: Sequence[Optional[str]] = (),
            seed: Optional[int] = None) -> None:
        """Set the configuration and the seed, and hash the inputs that exist."""
        self.config = config
        self.seed = seed
        self.inputs = {
            path: file_sha256(path) if os.path.exists(path) else None
            for path in inputs if path is not None}

    def write(self, directory: str, exit_code: int) -> str:
        self.finished = _now()
        self.exit_code = exit_code
        self.outputs = sorted(self.outputs)
        path = os.path.join(directory, MANIFEST_FILE)
        write_json(path, asdict(self))
        return path


def write_json(path: str, content: Any) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(content, f, indent=2, sort_keys=True, default=_json_default)
        f.write("\n")


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def fraction(value: str) -> float:
    """Argparse type accepting decimals and fractions such as ``1/3``."""
    try:
        return float(Fraction(value))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"Invalid fraction {value!r}")


def add_graph_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--graph-dir", type=str, default=None,
        help="Directory with edges.tsv and content.tsv (e.g. the output of norad_synth).")
    parser.add_argument("--edges", type=str, default=None, help="Edge list file.")
    parser.add_argument(
        "--features", type=str, default=None,
        help="Feature file, or Cora-style content file (.content suffix) with labels.")
    parser.add_argument(
        "--labels", type=str, default=None, help="Optional node_id<TAB>label file.")


def input_paths(args: argparse.Namespace) -> List[Optional[str]]:
    """Paths named by the graph arguments."""
    if args.graph_dir is not None:
        return [args.graph_dir]
    return [args.edges, args.features, args.labels]


def load_input_graph(args: argparse.Namespace) -> AttributedGraph:
    """Load the graph named by the CLI arguments."""
    if args.graph_dir is not None:
        return load_graph(args.graph_dir)
    if args.edges is None or args.features is None:
        raise ConfigError("Either --graph-dir or both --edges and --features are required")
    return load_graph_files(args.edges, args.features, args.labels)


def load_split_dir(directory: str) -> Tuple[AttributedGraph, EdgeSplit]:
    """Read the graph and the split written by ``norad_split``."""
    graph = load_graph(os.path.join(directory, GRAPH_DIR))
    split = load_split(os.path.join(directory, SPLIT_FILE))
    if split.n != graph.n:
        raise ConsistencyError(f"Split over {split.n} nodes, graph with {graph.n} nodes")
    return graph, split


def load_trained_model(
        checkpoint_dir: str,
        split_dir: str) -> Tuple[Checkpoint, AttributedGraph, EdgeSplit, NoradModel]:
    """Rebuild the model of a checkpoint on the training edges of a split."""
    checkpoint = load_checkpoint(checkpoint_dir)
    graph, split = load_split_dir(split_dir)
    expected = checkpoint.metadata.get("split_manifest_hash")
    if expected is not None and expected != split.manifest_hash():
        LOGGER.warning("The checkpoint was trained on a different split")
    model = NoradModel(checkpoint.config, graph.features, split.train_edges, checkpoint.values)
    return checkpoint, graph, split, model


def setup_output(directory: str) -> str:
    os.makedirs(directory, exist_ok=True)
    return directory
