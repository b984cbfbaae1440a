"""Monte-Carlo empirical risk: best-of-K loss averaged over fresh datasets."""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from deconvsim.distributions import draw_sample, evaluation_grid
from deconvsim.estimator import EstimatorParams, l2_loss
from deconvsim.exceptions import DeconvError
from deconvsim.harness.runtime import RunSettings
from deconvsim.schema import RiskSpec
from deconvsim.utils.common import derive_rng, derive_seed, run_parallel

logger = logging.getLogger("deconvsim")

Z_95 = 1.96


class Repetition(BaseModel):
    """Outcome of one dataset: the kept (smallest) loss and who achieved it."""

    index: int
    loss: Optional[float] = None
    best: Optional[EstimatorParams] = None
    losses: List[Optional[float]]


class RiskReport(BaseModel):
    """Empirical risk with its 95% normal-approximation interval."""

    scenario: str
    n: int
    repetitions: int
    param_sets: List[EstimatorParams]
    risk: Optional[float]
    ci: Optional[Tuple[float, float]]
    dropped: int
    per_repetition: List[Repetition]

    @property
    def kept_losses(self) -> List[float]:
        return [r.loss for r in self.per_repetition if r.loss is not None]


def _repetition(task) -> Repetition:
    spec, run, index = task
    scenario = spec.sized_scenario
    sample = draw_sample(scenario, derive_rng(spec.base_seed, index))
    optimizer = spec.optimizer.model_copy(
        update={"seed": derive_seed(spec.base_seed, index)}
    )
    pipeline = run.pipeline(optimizer, nodes=spec.nodes, oracle_law=scenario.signal)
    grid = evaluation_grid(scenario, spec.eval_points or run.eval_points)

    losses = []
    for params in spec.param_sets:
        try:
            estimate, _ = pipeline.run(sample, params, grid)
            loss = l2_loss(estimate, scenario.signal)
            losses.append(loss if math.isfinite(loss) else None)
        except (DeconvError, ValueError) as e:
            logger.warning(f"Repetition {index}, params {params} failed: {e}")
            losses.append(None)

    finite = [(loss, p) for loss, p in zip(losses, spec.param_sets) if loss is not None]
    if not finite:
        return Repetition(index=index, losses=losses)
    loss, best = min(finite, key=lambda item: item[0])
    return Repetition(index=index, loss=loss, best=best, losses=losses)


def summarize_losses(losses: List[float]) -> Tuple[float, Tuple[float, float]]:
    """Mean and mean +/- 1.96 sd / sqrt(count)."""
    values = np.asarray(losses, dtype=float)
    mean = float(values.mean())
    if values.size < 2:
        return mean, (mean, mean)
    half = Z_95 * float(values.std(ddof=1)) / math.sqrt(values.size)
    return mean, (mean - half, mean + half)


def run_risk(spec: RiskSpec, run: RunSettings) -> RiskReport:
    """Fresh dataset per repetition, one estimate per parameter set, min loss kept."""
    scenario = spec.sized_scenario
    logger.info(
        f"Risk on scenario {scenario.name}: {spec.repetitions} repetitions of "
        f"n={scenario.n}, {len(spec.param_sets)} parameter sets."
    )
    tasks = [(spec, run, index) for index in range(spec.repetitions)]
    repetitions = run_parallel(_repetition, tasks, workers=run.workers)

    kept = [r.loss for r in repetitions if r.loss is not None]
    dropped = len(repetitions) - len(kept)
    if dropped:
        logger.warning(f"{dropped} repetitions failed for every parameter set.")

    risk, ci = summarize_losses(kept) if kept else (None, None)
    return RiskReport(
        scenario=scenario.name,
        n=scenario.n,
        repetitions=spec.repetitions,
        param_sets=spec.param_sets,
        risk=risk,
        ci=ci,
        dropped=dropped,
        per_repetition=repetitions,
    )
