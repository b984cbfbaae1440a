"""Per-rho estimates, selection of rho and the optional combination step."""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from deconvsim.adaptation import (
    CombinationConfig,
    RhoGrid,
    combine,
    rho_table,
    select_rho,
)
from deconvsim.alternatives import get_alternative
from deconvsim.distributions import ScenarioSpec, evaluation_grid
from deconvsim.estimator import (
    DensityEstimate,
    EstimatorParams,
    OptimizerConfig,
    PairedSample,
    theoretical_params,
)
from deconvsim.exceptions import DeconvError, NumericalFailureError
from deconvsim.harness.runtime import RunSettings

logger = logging.getLogger("deconvsim")


class RhoRow(BaseModel):
    rho: float
    params: Optional[EstimatorParams] = None
    a_n: Optional[float] = None
    sigma_n: Optional[float] = None
    error: Optional[str] = None


class AdaptReport(BaseModel):
    """Selected rho, the A_n / sigma_n table and, if run, the combination branch."""

    n: int
    beta: float
    c_sigma: float
    rho_hat: float
    rows: List[RhoRow]
    branch: Optional[str] = None


def data_grid(
    sample: PairedSample, points: int, scenario: Optional[ScenarioSpec] = None
) -> np.ndarray:
    """Scenario window when known, else mean +/- 6 sd of (Y1 + Y2) / 2."""
    if scenario is not None:
        return evaluation_grid(scenario, points)
    averaged = 0.5 * (sample.y1 + sample.y2)
    center = float(averaged.mean())
    spread = 6.0 * max(float(averaged.std()), 1e-3)
    return np.linspace(center - spread, center + spread, points)


def run_adapt_rho(
    sample: PairedSample,
    rhos: Sequence[float],
    beta: float,
    run: RunSettings,
    eval_grid,
    optimizer: Optional[OptimizerConfig] = None,
    params: Optional[EstimatorParams] = None,
    S: float = 1.0,
    c_h: float = float(np.exp(-4.0)),
    nu_est: float = 1.0,
    fit_degree: Optional[int] = None,
    oracle_law=None,
    with_combination: bool = False,
) -> Tuple[AdaptReport, DensityEstimate]:
    """
    Estimates the density for every rho (theoretical parameters unless `params`
    is given), selects rho_hat among the rhos that succeeded and returns the
    selected estimate, combined with the alternative estimator on request.
    """
    rhos = sorted(float(r) for r in rhos)
    pipeline = run.pipeline(optimizer, fit_degree=fit_degree, oracle_law=oracle_law)

    estimates: Dict[float, DensityEstimate] = {}
    rows: Dict[float, RhoRow] = {}
    for rho in rhos:
        try:
            rho_params = params or theoretical_params(
                sample.n, rho, S, c_h, nu_est=nu_est
            )
            estimates[rho], _ = pipeline.run(sample, rho_params, eval_grid)
            rows[rho] = RhoRow(rho=rho, params=rho_params)
        except (DeconvError, ValueError) as e:
            logger.warning(f"rho={rho} failed: {e}")
            rows[rho] = RhoRow(rho=rho, error=str(e))

    if not estimates:
        raise NumericalFailureError("no rho of the grid produced an estimate")

    grid = RhoGrid(rhos=tuple(estimates), beta=beta, c_sigma=run.c_sigma, n=sample.n)
    rho_hat, a_values = select_rho(estimates, grid)
    for record in rho_table(a_values, grid).itertuples():
        rows[record.rho] = rows[record.rho].model_copy(
            update={"a_n": record.a_n, "sigma_n": record.sigma_n}
        )
    logger.info(f"Selected rho={rho_hat} among {list(estimates)}.")

    selected, branch = estimates[rho_hat], None
    if with_combination:
        alternative = get_alternative(run.alternative).estimate(sample, eval_grid)
        config = CombinationConfig(c_adapt=run.c_adapt, beta=beta, rho=rho_hat)
        selected, branch = combine(selected, alternative, config, sample.n)
        logger.info(f"Combination kept the {branch} estimate.")

    report = AdaptReport(
        n=sample.n,
        beta=beta,
        c_sigma=run.c_sigma,
        rho_hat=rho_hat,
        rows=[rows[rho] for rho in rhos],
        branch=branch,
    )
    return report, selected
