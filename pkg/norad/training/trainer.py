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

import dataclasses
import logging
import os
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from norad.autodiff import backward
from norad.config import TrainConfig, rng_stream
from norad.errors import NumericError
from norad.graph.split import EdgeSplit
from norad.graph.store import AttributedGraph
from norad.logger import log_trace
from norad.metrics.link_prediction import ScoredEdges, roc_auc, score_edges
from norad.model.prior import temperature_schedule
from norad.model.vgae import NoradModel, Noise
from norad.training.adam import AdamState, adam_step
from norad.training.checkpoint import save_checkpoint


LOGGER = logging.getLogger('norad.training.trainer')

LAST_CHECKPOINT = "last"
BEST_CHECKPOINT = "best"


@dataclass
class TraceRecord:
    """One inner iteration of the E-step (``phase="E"``) or of the M-step (``phase="M"``)."""
    iteration: int
    phase: str
    round: int
    objective: float
    edge: float
    attribute: float = 0.0
    kl_bernoulli: float = 0.0
    kl_gaussian: float = 0.0
    temperature: Optional[float] = None
    wall_time: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


class TrainTrace:
    """Ordered trace records; every record is also written to the JSON-lines trace log."""
    def __init__(self):
        self.records: List[TraceRecord] = []

    def append(self, record: TraceRecord) -> None:
        assert not self.records or record.iteration > self.records[-1].iteration, \
            f"Trace iterations must increase, got {record.iteration} after " \
            f"{self.records[-1].iteration}"
        self.records.append(record)
        log_trace(record.to_dict())

    def phase(self, phase: str) -> List[TraceRecord]:
        return [r for r in self.records if r.phase == phase]

    def __len__(self) -> int:
        return len(self.records)


@dataclass
class FitResult:
    model: NoradModel
    trace: TrainTrace
    rounds: int
    converged: bool
    round_elbos: List[float] = field(default_factory=list)
    best_val_auc: Optional[float] = None
    best_round: Optional[int] = None


class Trainer:
    """
    Variational EM: every outer round runs ``t_e`` Adam ascent iterations on the ELBO over the
    encoder and attribute decoder (E-step), then ``t_m`` iterations on the penalized edge
    log-likelihood over the blockmodel (M-step).

    The relaxation temperature is annealed over the first ``anneal_fraction`` of the
    cumulative E-iterations, and fresh reparameterization noise is drawn from the ``noise``
    stream at every E-iteration. The M-step is skipped while the representation is empty.

    Args:
        model (NoradModel): the model to train; it is mutated in place.
        config (TrainConfig): hyper-parameters.
        validation (EdgeSplit, optional): split providing validation pairs, used to keep the
            best checkpoint by validation AUC.
        checkpoint_dir (str, optional): directory receiving the ``last`` and ``best``
            checkpoints after every outer round.
    """
    def __init__(
            self,
            model: NoradModel,
            config: TrainConfig,
            validation: Optional[EdgeSplit] = None,
            checkpoint_dir: Optional[str] = None):
        self.model = model
        self.config = config
        self.validation = validation
        self.checkpoint_dir = checkpoint_dir
        self.trace = TrainTrace()
        self.e_adam = AdamState()
        self.m_adam = AdamState()
        self.noise_rng = rng_stream(config.seed, "noise")
        self.e_iterations = 0
        self.iteration = 0
        self.round = 0
        self.anneal_e_iterations = max(
            int(round(config.anneal_fraction * config.outer_rounds * config.t_e)), 1)
        self.start_time = time.perf_counter()
        self.last_good = model.params.snapshot()
        self.metadata: Dict[str, Any] = {}
        if validation is not None:
            self.metadata["split_manifest_hash"] = validation.manifest_hash()

    def _elapsed(self) -> float:
        return time.perf_counter() - self.start_time

    def temperature(self) -> float:
        return temperature_schedule(
            self.e_iterations, self.anneal_e_iterations,
            self.config.temperature_start, self.config.temperature_floor)

    def e_step(self) -> List[TraceRecord]:
        params = self.model.e_parameters()
        records = []
        for _ in range(self.config.t_e):
            temperature = self.temperature()
            noise = Noise.draw(self.noise_rng, self.model.n, self.config.k)
            try:
                terms = self.model.elbo(noise, temperature)
            except NumericError as e:
                raise NumericError(
                    f"{e} (E-step iteration {self.iteration})", term=e.term,
                    breakdown=e.breakdown) from e
            grads = backward(terms.total, params)
            adam_step(params, grads, self.e_adam, self.config.learning_rate)
            self.e_iterations += 1
            self.iteration += 1
            record = TraceRecord(
                iteration=self.iteration, phase="E", round=self.round,
                objective=terms.breakdown["elbo"], edge=terms.breakdown["edge"],
                attribute=terms.breakdown["attribute"],
                kl_bernoulli=terms.breakdown["kl_bernoulli"],
                kl_gaussian=terms.breakdown["kl_gaussian"],
                temperature=temperature, wall_time=self._elapsed())
            self.trace.append(record)
            records.append(record)
        return records

    def m_step(self) -> List[TraceRecord]:
        params = self.model.m_parameters()
        if not params:
            LOGGER.debug("Blockmodel is fixed: M-step skipped")
            return []
        z = self.model.representation(self.config.m_step_representation)
        if not np.any(z):
            LOGGER.warning(
                f"Round {self.round}: the representation has no active entry, the blockmodel "
                f"is left unchanged")
            return []
        records = []
        for _ in range(self.config.t_m):
            try:
                objective, edge = self.model.m_objective(z)
            except NumericError as e:
                raise NumericError(
                    f"{e} (M-step iteration {self.iteration})", term=e.term,
                    breakdown=e.breakdown) from e
            grads = backward(objective, params)
            adam_step(params, grads, self.m_adam, self.config.learning_rate)
            self.iteration += 1
            value = objective.item()
            record = TraceRecord(
                iteration=self.iteration, phase="M", round=self.round, objective=value,
                edge=edge, wall_time=self._elapsed())
            self.trace.append(record)
            records.append(record)
        return records

    def validation_auc(self) -> Optional[float]:
        if self.validation is None or self.validation.val_pos.shape[0] == 0 or \
                self.validation.val_neg.shape[0] == 0:
            return None
        z = self.model.representation("threshold")
        pos = score_edges(z, self.model.b, self.validation.val_pos)
        neg = score_edges(z, self.model.b, self.validation.val_neg)
        return roc_auc(ScoredEdges.from_split(
            self.validation.val_pos, self.validation.val_neg, pos, neg))

    def save(self, name: str, metadata: Optional[Dict[str, Any]] = None) -> None:
        if self.checkpoint_dir is None:
            return
        save_checkpoint(
            os.path.join(self.checkpoint_dir, name), self.config,
            self.model.params.snapshot(), {**self.metadata, **(metadata or {})})

    def converged(self, round_elbos: List[float]) -> bool:
        """
        Whether the mean round ELBO has stopped improving: the relative gain over the last
        ``convergence_window`` rounds is non-negative and below ``convergence_tol``. The test
        never passes while the temperature is still annealing.
        """
        window = self.config.convergence_window
        if len(round_elbos) <= window or self.temperature() > self.config.temperature_floor:
            return False
        previous = round_elbos[-1 - window]
        improvement = (round_elbos[-1] - previous) / max(abs(previous), 1e-12)
        return 0.0 <= improvement < self.config.convergence_tol

    def fit(self) -> FitResult:
        """
        Alternate E- and M-steps for ``outer_rounds`` rounds, or until :meth:`converged`.

        Raises:
            NumericError: when the objective becomes non-finite; the parameters of the last
                completed round are restored and saved as the ``last`` checkpoint first.
        """
        round_elbos = []
        best_auc, best_round = None, None
        converged = False
        try:
            for self.round in range(1, self.config.outer_rounds + 1):
                e_records = self.e_step()
                self.m_step()
                round_elbos.append(float(np.mean([r.objective for r in e_records])))
                self.last_good = self.model.params.snapshot()
                auc = self.validation_auc()
                info = {"round": self.round, "elbo": round_elbos[-1], "val_auc": auc}
                self.save(LAST_CHECKPOINT, info)
                if auc is not None and (best_auc is None or auc > best_auc):
                    best_auc, best_round = auc, self.round
                    self.save(BEST_CHECKPOINT, info)
                suffix = f", val AUC {auc:.4f}" if auc is not None else ""
                LOGGER.info(
                    f"Round {self.round}: mean ELBO {round_elbos[-1]:.4f}, temperature "
                    f"{self.temperature():.4f}{suffix}")
                if self.converged(round_elbos):
                    converged = True
                    LOGGER.info(f"ELBO converged after {self.round} rounds")
                    break
        except NumericError as e:
            LOGGER.error(f"Numeric failure in term {e.term}: {e.breakdown}")
            self.model.params.restore(self.last_good)
            self.save(LAST_CHECKPOINT, {"round": self.round - 1, "failed": str(e)})
            raise
        except KeyboardInterrupt:
            LOGGER.warning("Interrupted: saving the last completed round")
            self.model.params.restore(self.last_good)
            self.save(LAST_CHECKPOINT, {"round": self.round - 1, "interrupted": True})
            raise
        return FitResult(
            model=self.model, trace=self.trace, rounds=self.round, converged=converged,
            round_elbos=round_elbos, best_val_auc=best_auc, best_round=best_round)


def e_step(trainer: Trainer) -> List[TraceRecord]:
    return trainer.e_step()


def m_step(trainer: Trainer) -> List[TraceRecord]:
    return trainer.m_step()


def fit(
        graph: AttributedGraph,
        config: TrainConfig,
        split: Optional[EdgeSplit] = None,
        checkpoint_dir: Optional[str] = None) -> FitResult:
    """
    Train a model on ``graph``. With a split, only its training edges are visible and the
    validation pairs select the best checkpoint.
    """
    train_edges = split.train_edges if split is not None else graph.edges
    model = NoradModel(config, graph.features, train_edges)
    return Trainer(model, config, validation=split, checkpoint_dir=checkpoint_dir).fit()
