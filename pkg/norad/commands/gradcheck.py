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
from typing import Dict

import norad
from norad.autodiff import grad_check
from norad.commands.common import EXIT_NUMERIC_ERROR, EXIT_OK, REPORT_FILE, RunManifest, run, \
    setup_output, write_json
from norad.config import TrainConfig, rng_stream
from norad.model.vgae import NoradModel, Noise
from norad.synthgen import PRESETS, generate_preset


logging.basicConfig(
    format='%(asctime)s | %(levelname)s | %(name)s | %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S',
    level=logging.INFO,
    force=True
)
LOGGER = logging.getLogger('norad.commands.gradcheck')

TOLERANCE = 1e-4
SCALES = ("tiny",)


def check_elbo_gradients(
        seed: int = 0,
        epsilon: float = 1e-5,
        temperature: float = 0.7,
        scale: str = "tiny") -> Dict[str, float]:
    """
    Gradient check of the full ELBO over every parameter (encoder heads, attribute decoder
    and blockmodel) on a planted instance, with frozen noise and a fixed temperature.

    Returns:
        Dict[str, float]: worst relative error of every parameter and ``max`` over all.
    """
    preset = PRESETS[scale]
    instance = generate_preset(preset, seed)
    config = TrainConfig(
        k=preset.k, d_prime=preset.d_prime, d_dprime=preset.d_dprime, seed=seed)
    model = NoradModel(config, instance.graph.features, instance.graph.edges)
    rng = rng_stream(seed, "gradcheck")
    model.block_model.b.assign(rng.normal(0.0, 0.5, size=(preset.k, preset.k)))
    noise = Noise.draw(rng, model.n, preset.k)

    def loss():
        return model.elbo(noise, temperature).total

    errors = {param.name: grad_check(loss, [param], epsilon) for param in model.params}
    errors["max"] = max(errors.values())
    return errors


def main(args: argparse.Namespace, manifest: RunManifest) -> int:
    """Run the gradient check; the exit code is 0 only when the error is below tolerance."""
    manifest.record(
        {"scale": args.scale, "epsilon": args.epsilon, "temperature": args.temperature},
        seed=args.seed)
    errors = check_elbo_gradients(args.seed, args.epsilon, args.temperature, args.scale)
    worst = errors["max"]
    for name, error in errors.items():
        LOGGER.info(f"{name}: {error:.3e}")
    print(f"Max relative error: {worst:.3e}")
    passed = worst < TOLERANCE
    if args.out is not None:
        out = setup_output(args.out)
        write_json(os.path.join(out, REPORT_FILE), {**errors, "passed": passed})
        manifest.outputs = [REPORT_FILE]
    return EXIT_OK if passed else EXIT_NUMERIC_ERROR


def cli_main():
    """
    Gradient check command.

    Typical usage from the command line::

        $ norad_gradcheck --scale tiny
    """
    LOGGER.info(f"norad version: {norad.__version__}")
    parser = argparse.ArgumentParser("norad_gradcheck")
    parser.add_argument("--scale", choices=SCALES, default="tiny")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epsilon", type=float, default=1e-5)
    parser.add_argument("--temperature", type=float, default=0.7)
    parser.add_argument("--out", type=str, default=None, help="Optional output directory.")
    sys.exit(run(main, parser.parse_args(), "gradcheck"))


if __name__ == "__main__":
    cli_main()
