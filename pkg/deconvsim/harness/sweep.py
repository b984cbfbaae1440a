"""Loss tables over (m, nu_est, h) on a single dataset."""

import logging
import math
from typing import List

import pandas as pd

from deconvsim.distributions import evaluation_grid
from deconvsim.estimator import EstimatorParams, PairedSample, clip, invert, l2_loss
from deconvsim.exceptions import DeconvError
from deconvsim.harness.runtime import RunSettings
from deconvsim.harness.simulate import simulate
from deconvsim.schema import SweepSpec
from deconvsim.utils.common import derive_seed, run_parallel

logger = logging.getLogger("deconvsim")

COLUMNS = ["m", "nu_est", "h", "loss"]


def _sweep_task(task) -> List[float]:
    """Losses of every h for one (m, nu_est): one fit, several inversions."""
    spec, run, sample, index, m, nu_est = task
    optimizer = spec.optimizer.model_copy(
        update={"seed": derive_seed(spec.scenario.seed, index)}
    )
    pipeline = run.pipeline(
        optimizer, nodes=spec.nodes, oracle_law=spec.scenario.signal
    )
    grid = evaluation_grid(spec.scenario, spec.eval_points or run.eval_points)

    try:
        fit = pipeline.fit(sample, EstimatorParams(m=m, nu_est=nu_est, h=1.0))
    except (DeconvError, ValueError) as e:
        logger.warning(f"Sweep fit (m={m}, nu_est={nu_est}) failed: {e}")
        return [math.inf] * len(spec.h_list)

    losses = []
    for h in spec.h_list:
        params = EstimatorParams(m=m, nu_est=nu_est, h=h)
        try:
            estimate = clip(
                invert(fit.phi_hat, params, grid, quad_points=run.quad_points)
            )
            loss = l2_loss(estimate, spec.scenario.signal)
        except (DeconvError, ValueError) as e:
            logger.warning(f"Sweep cell {params} failed: {e}")
            loss = math.inf
        losses.append(loss if math.isfinite(loss) else math.inf)
    return losses


def run_sweep(spec: SweepSpec, run: RunSettings, sample: PairedSample = None):
    """
    One row m,nu_est,h,loss per cell of the cross product, m outermost. The
    dataset is drawn once from the scenario unless `sample` is given.
    """
    if sample is None:
        sample = simulate(spec.scenario)

    pairs = [(m, nu) for m in spec.m_list for nu in spec.nu_list]
    tasks = [(spec, run, sample, i, m, nu) for i, (m, nu) in enumerate(pairs)]
    logger.info(
        f"Sweep on scenario {spec.scenario.name}: {len(pairs)} fits, "
        f"{len(pairs) * len(spec.h_list)} cells, {run.workers} workers."
    )
    results = run_parallel(_sweep_task, tasks, workers=run.workers)

    rows = [
        {"m": m, "nu_est": nu, "h": h, "loss": loss}
        for (m, nu), losses in zip(pairs, results)
        for h, loss in zip(spec.h_list, losses)
    ]
    return pd.DataFrame(rows, columns=COLUMNS)


def top_k(table: pd.DataFrame, k: int) -> pd.DataFrame:
    """The k cells with the smallest finite losses, best first."""
    finite = table[table["loss"].map(math.isfinite)]
    return finite.nsmallest(k, "loss", keep="first").reset_index(drop=True)
