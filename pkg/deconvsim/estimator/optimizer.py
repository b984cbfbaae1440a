"""Search for a near-minimizer of M_n over the polynomial coefficients."""

import logging
import math
from typing import Dict, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import optimize

from deconvsim.estimator.cf_model import (
    PolyCF,
    UpsilonBound,
    clamp_to_upsilon,
    project_cf,
    truncate,
)
from deconvsim.estimator.criterion import (
    CriterionContext,
    criterion_from_stored,
    criterion_gradient,
    criterion_value,
)
from deconvsim.exceptions import (
    DeconvError,
    NumericalFailureError,
    UnsupportedInitializationError,
)
from deconvsim.utils.common import derive_rng, run_parallel

logger = logging.getLogger("deconvsim")

SCIPY_METHODS = {"quasi-newton-fd": "BFGS", "nelder-mead": "Nelder-Mead"}

# gradient norm of the normalized objective under which a fit counts as converged
GRADIENT_TOL = 1e-5

# restart jitter, absolute or relative to the envelope when clamping
JITTER = 0.1


class OptimizerConfig(BaseModel):
    """Settings of one coefficient search."""

    model_config = ConfigDict(frozen=True)

    method: Literal["nelder-mead", "quasi-newton-fd"] = "quasi-newton-fd"
    max_iters: int = Field(200, ge=1)
    ftol: float = Field(1e-8, gt=0)
    init: Union[Literal["oracle-projection", "zeros"], PolyCF] = "oracle-projection"
    clamp: bool = False
    restarts: int = Field(0, ge=0)
    fd_step: float = Field(1e-6, gt=0)
    upsilon: UpsilonBound = UpsilonBound(rho=2, S=10)
    seed: int = Field(0, ge=0)

    @classmethod
    def from_settings(cls, settings, **overrides) -> "OptimizerConfig":
        """Builds the config from the [Optimizer] section of the ini settings."""
        section = settings["Optimizer"]
        values = {
            "method": section.get("METHOD"),
            "max_iters": section.getint("MAX_ITERS"),
            "ftol": section.getfloat("FTOL"),
            "init": section.get("INIT"),
            "clamp": section.getboolean("CLAMP"),
            "restarts": section.getint("RESTARTS"),
            "fd_step": section.getfloat("FD_STEP"),
            "upsilon": UpsilonBound(
                rho=section.getfloat("RHO"), S=section.getfloat("S")
            ),
            "seed": settings["Harness"].getint("SEED"),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class FitResult(BaseModel):
    """Outcome of a fit; `failed` entries carry the error instead of a polynomial."""

    model_config = ConfigDict(frozen=True)

    m: int
    phi_hat: Optional[PolyCF] = None
    objective: float = math.inf
    init_objective: float = math.inf
    iterations: int = 0
    converged: bool = False
    failed: bool = False
    error: Optional[str] = None

    def near_minimizer(self, n: int) -> bool:
        """objective <= M_n(start) + 1/n."""
        return not self.failed and self.objective <= self.init_objective + 1.0 / n

    def to_report(self, cfg: OptimizerConfig) -> dict:
        """JSON-ready record of the fit together with its configuration."""
        return {
            "fit": self.model_dump(mode="json"),
            "config": cfg.model_dump(mode="json"),
        }


def initial_point(m: int, cfg: OptimizerConfig, oracle_law=None) -> PolyCF:
    """Starting polynomial of degree m."""
    if isinstance(cfg.init, PolyCF):
        start = truncate(cfg.init, m)
        padded = np.zeros(m)
        padded[: start.m] = start.stored
        return PolyCF.from_stored(padded)
    if cfg.init == "zeros":
        return PolyCF.constant(m)
    if oracle_law is None:
        raise UnsupportedInitializationError(
            "oracle-projection initialization needs the signal law"
        )
    return project_cf(oracle_law, m)


class _Objective:
    """M_n / scale on stored vectors, with clamping and divergence bookkeeping."""

    def __init__(self, ctx: CriterionContext, cfg: OptimizerConfig, m: int, scale):
        self.ctx = ctx
        self.cfg = cfg
        self.scale = scale
        self.bounds = cfg.upsilon.bounds(m)
        self.history = []

    def project(self, theta: np.ndarray) -> np.ndarray:
        if self.cfg.clamp:
            return np.clip(theta, -self.bounds, self.bounds)
        return theta

    def __call__(self, theta: np.ndarray) -> float:
        value = criterion_from_stored(self.ctx, self.project(theta)) / self.scale
        if not math.isfinite(value):
            return math.inf
        return value

    def gradient(self, theta: np.ndarray) -> np.ndarray:
        p = PolyCF.from_stored(self.project(theta))
        grad = criterion_gradient(self.ctx, p, self.cfg.fd_step) / self.scale
        return np.where(np.isfinite(grad), grad, 0.0)

    def record(self, theta, *_):
        self.history.append(self(theta))


def _search(objective: _Objective, start: np.ndarray, cfg: OptimizerConfig):
    method = SCIPY_METHODS[cfg.method]
    if method == "BFGS":
        options = {"maxiter": cfg.max_iters, "gtol": GRADIENT_TOL}
        jac = objective.gradient
    else:
        options = {"maxiter": cfg.max_iters, "fatol": cfg.ftol, "xatol": 1e-10}
        jac = None

    objective.history = [objective(start)]
    result = optimize.minimize(
        objective,
        start,
        method=method,
        jac=jac,
        callback=objective.record,
        options=options,
    )
    return result


def _converged(objective: _Objective, result, cfg: OptimizerConfig) -> bool:
    if result.success:
        return True
    history = objective.history
    if len(history) >= 2 and math.isfinite(history[-2]) and history[-2] > 0:
        if (history[-2] - history[-1]) / history[-2] < cfg.ftol:
            return True
    grad = getattr(result, "jac", None)
    return grad is not None and float(np.linalg.norm(grad)) < GRADIENT_TOL


def fit_cf(
    ctx: CriterionContext, m: int, cfg: OptimizerConfig, oracle_law=None
) -> FitResult:
    """
    Minimizes M_n over degree-m candidates from the configured starting point.
    The returned objective never exceeds M_n at the start: a search that ends
    higher falls back to the starting polynomial.
    """
    start = initial_point(m, cfg, oracle_law)
    if cfg.clamp:
        start = clamp_to_upsilon(start, cfg.upsilon)

    init_objective = criterion_value(ctx, start)
    if not math.isfinite(init_objective):
        raise NumericalFailureError(
            "criterion is not finite at the starting point", iterate=start.stored
        )

    if m == 0 or init_objective == 0.0:
        return FitResult(
            m=m,
            phi_hat=start,
            objective=init_objective,
            init_objective=init_objective,
            converged=True,
        )

    objective = _Objective(ctx, cfg, m, scale=init_objective)
    best, iterations, converged = None, 0, False
    starts = [start.stored]
    for restart in range(1, cfg.restarts + 1):
        rng = derive_rng(cfg.seed, restart)
        sd = JITTER * objective.bounds if cfg.clamp else JITTER
        starts.append(start.stored + rng.normal(0.0, 1.0, m) * sd)

    for theta0 in starts:
        result = _search(objective, objective.project(theta0), cfg)
        iterations += int(getattr(result, "nit", 0))
        if best is None or result.fun < best.fun:
            best = result
            converged = _converged(objective, result, cfg)

    phi_hat = PolyCF.from_stored(objective.project(best.x))
    final = criterion_value(ctx, phi_hat)
    if not math.isfinite(final):
        raise NumericalFailureError(
            "criterion diverged during the search", iterate=phi_hat.stored
        )

    if final > init_objective:
        logger.warning(
            f"Search for m={m} ended above its start ({final:.3e} > "
            f"{init_objective:.3e}), keeping the starting polynomial."
        )
        phi_hat, final, converged = start, init_objective, False

    logger.debug(
        f"fit m={m}: M_n {init_objective:.4e} -> {final:.4e} "
        f"in {iterations} iterations (converged={converged})"
    )
    return FitResult(
        m=m,
        phi_hat=phi_hat,
        objective=final,
        init_objective=init_objective,
        iterations=iterations,
        converged=converged,
    )


def fit_cf_over_degrees(
    ctx: CriterionContext,
    degrees: Sequence[int],
    cfg: OptimizerConfig,
    oracle_law=None,
    workers: int = 1,
) -> Dict[int, FitResult]:
    """One independent fit per degree on a shared context; failures are flagged."""
    degrees = [int(d) for d in degrees]
    if not degrees:
        raise ValueError("degrees must not be empty")
    if len(set(degrees)) != len(degrees):
        raise ValueError(f"duplicate degrees in {degrees}")

    def fit_one(m):
        try:
            return fit_cf(ctx, m, cfg, oracle_law)
        except (NumericalFailureError, DeconvError) as e:
            logger.warning(f"Fit for degree {m} failed: {e}")
            return FitResult(m=m, failed=True, error=str(e))

    results = run_parallel(fit_one, degrees, workers=workers, prefer="threads")
    return dict(zip(degrees, results))
