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
from typing import Union

import norad
from norad.commands.common import EXIT_OK, REPORT_FILE, RunManifest, load_split_dir, run, \
    setup_output, write_json
from norad.config import DECODER_MODES, M_STEP_REPRESENTATIONS, config_hash, load_train_config
from norad.logger import setup_trace_logger
from norad.model.vgae import NoradModel
from norad.training.checkpoint import save_checkpoint
from norad.training.trainer import Trainer


logging.basicConfig(
    format='%(asctime)s | %(levelname)s | %(name)s | %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S',
    level=logging.INFO,
    force=True
)
LOGGER = logging.getLogger('norad.commands.train')

CHECKPOINTS_DIR = "checkpoints"
FINAL_CHECKPOINT = "final"
TRACE_FILE = "trace.jsonl"

# CLI flag -> TrainConfig field, type
OVERRIDES = {
    "alpha": float,
    "gamma": float,
    "k": int,
    "d_prime": int,
    "d_dprime": int,
    "t_e": int,
    "t_m": int,
    "outer_rounds": int,
    "learning_rate": float,
    "temperature_start": float,
    "temperature_floor": float,
    "seed": int,
    "block_rows": int,
}


def pos_weight(value: str) -> Union[str, float]:
    if value in ("auto", "none"):
        return value
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"pos_weight must be auto, none or a number: {value}")


def main(args: argparse.Namespace, manifest: RunManifest) -> int:
    """
    Train a model on the training edges of a split. The ``last`` checkpoint is refreshed at
    every outer round, ``best`` keeps the round with the highest validation AUC and ``final``
    holds the parameters at the end of the training.
    """
    overrides = {name: getattr(args, name) for name in OVERRIDES}
    overrides.update({
        "decoder": args.decoder,
        "pos_weight": args.pos_weight,
        "m_step_representation": args.m_step_representation,
        "l2_normalize": args.l2_normalize,
    })
    manifest.record(overrides, [args.split, args.config], args.seed)
    config = load_train_config(args.config, overrides)
    manifest.config, manifest.seed = config.to_dict(), config.seed
    LOGGER.info(f"Training configuration {config_hash(config)[:12]}: {config.to_dict()}")
    graph, split = load_split_dir(args.split)
    out = setup_output(args.out)
    trace_file = args.trace_file or os.path.join(out, TRACE_FILE)
    setup_trace_logger(trace_file)
    checkpoints = os.path.join(out, CHECKPOINTS_DIR)

    model = NoradModel(config, graph.features, split.train_edges)
    trainer = Trainer(model, config, validation=split, checkpoint_dir=checkpoints)
    result = trainer.fit()
    save_checkpoint(
        os.path.join(checkpoints, FINAL_CHECKPOINT), config, model.params.snapshot(),
        {**trainer.metadata, "round": result.rounds})
    report = {
        "rounds": result.rounds,
        "converged": result.converged,
        "final_elbo": result.round_elbos[-1] if result.round_elbos else None,
        "best_val_auc": result.best_val_auc,
        "best_round": result.best_round,
        "config_hash": config_hash(config),
        "split_manifest_hash": split.manifest_hash(),
    }
    write_json(os.path.join(out, REPORT_FILE), report)
    manifest.outputs = [CHECKPOINTS_DIR, REPORT_FILE, trace_file]
    return EXIT_OK


def cli_main():
    """
    Training command. Flags override the values of the configuration file, which override
    the defaults of :class:`norad.config.TrainConfig`.

    Typical usage from the command line::

        $ norad_train --split splits/cora-85 --config config/link_prediction.yaml \\
            --out runs/cora-85

    Exit codes: 0 success, 2 input error, 3 incompatible inputs, 4 numeric failure (the
    ``last`` checkpoint holds the last completed round), 130 when interrupted.
    """
    LOGGER.info(f"norad version: {norad.__version__}")
    parser = argparse.ArgumentParser("norad_train")
    parser.add_argument(
        "--split", type=str, required=True, help="Output directory of norad_split.")
    parser.add_argument(
        "--config", type=str, default=None, help="YAML/JSON file with flat TrainConfig keys.")
    parser.add_argument("--out", type=str, required=True, help="Output directory.")
    parser.add_argument(
        "--trace-file", type=str, default=None,
        help=f"JSON-lines file receiving one record per inner iteration. "
             f"Default: <out>/{TRACE_FILE}.")
    for name, arg_type in OVERRIDES.items():
        parser.add_argument(f"--{name.replace('_', '-')}", type=arg_type, default=None)
    parser.add_argument("--decoder", choices=DECODER_MODES, default=None)
    parser.add_argument("--pos-weight", type=pos_weight, default=None)
    parser.add_argument("--m-step-representation", choices=M_STEP_REPRESENTATIONS, default=None)
    parser.add_argument(
        "--l2-normalize", action="store_true", default=None,
        help="Row-normalize the hidden features of the encoder.")
    sys.exit(run(main, parser.parse_args(), "train"))


if __name__ == "__main__":
    cli_main()
