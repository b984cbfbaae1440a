"""
From a fitted characteristic function to a density estimate:

    f(t) = (1 / 2 pi) * integral over [-h, h] of exp(-i t u) T_m phi(u) du

followed by max(0, .) clipping, L2 losses and the theoretical (m, h) formulas.
"""

import logging
import math
from pathlib import Path
from typing import Callable, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import integrate

from deconvsim.estimator.cf_model import PolyCF, evaluate, truncate
from deconvsim.exceptions import (
    DegenerateParametersError,
    InternalConsistencyError,
    ParameterDomainError,
)
from deconvsim.utils.common import run_parallel, save_json_file

logger = logging.getLogger("deconvsim")

MIN_QUAD_POINTS = 64
# abscissae per block of the inversion matrix product
INVERT_CHUNK = 512
IMAG_TOL = 1e-8


class EstimatorParams(BaseModel):
    """Truncation degree m, criterion half-width nu_est, inversion cutoff h."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=0)
    nu_est: float = Field(gt=0)
    h: float = Field(gt=0)

    def as_tuple(self) -> Tuple[int, float, float]:
        return self.m, self.nu_est, self.h

    def __str__(self):
        return f"({self.m}, {self.nu_est:g}, {self.h:g})"


class DensityEstimate(BaseModel):
    """Real function tabulated on a regular, strictly increasing grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: np.ndarray
    values: np.ndarray
    params: Optional[EstimatorParams] = None
    clipped: bool = False

    @field_validator("grid", "values", mode="before")
    @classmethod
    def as_vector(cls, value):
        array = np.array(value, dtype=float)
        array.flags.writeable = False
        return array

    @model_validator(mode="after")
    def check_grid(self):
        if self.grid.ndim != 1 or self.grid.size < 2:
            raise ValueError("evaluation grid needs at least two points")
        if self.values.shape != self.grid.shape:
            raise ValueError("values and grid differ in shape")
        steps = np.diff(self.grid)
        if np.any(steps <= 0):
            raise ValueError("evaluation grid must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
            raise ValueError("evaluation grid must be regular")
        if self.clipped and np.any(self.values < 0):
            raise ValueError("a clipped estimate cannot hold negative values")
        return self

    @property
    def spacing(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def same_grid(self, other: "DensityEstimate") -> bool:
        return self.grid.shape == other.grid.shape and np.allclose(
            self.grid, other.grid, rtol=0.0, atol=1e-12
        )


CharacteristicFunction = Union[PolyCF, Callable[[np.ndarray], np.ndarray]]


def invert(
    p: CharacteristicFunction,
    params: EstimatorParams,
    eval_grid,
    quad_points: int = 4096,
    workers: int = 1,
) -> DensityEstimate:
    """
    Fourier inversion of T_m phi on [-h, h] by a midpoint sum with quad_points
    nodes. `p` is normally a PolyCF; any Hermitian callable is accepted too.
    """
    if quad_points < MIN_QUAD_POINTS:
        raise ParameterDomainError(
            f"quad_points must be >= {MIN_QUAD_POINTS}, got {quad_points}"
        )

    h = params.h
    step = 2.0 * h / quad_points
    nodes = -h + (np.arange(quad_points) + 0.5) * step
    if isinstance(p, PolyCF):
        phi = evaluate(truncate(p, params.m), nodes)
    else:
        phi = np.asarray(p(nodes), dtype=complex)

    t = np.asarray(eval_grid, dtype=float)
    chunks = np.array_split(np.arange(t.size), max(1, math.ceil(t.size / INVERT_CHUNK)))

    def integrate_chunk(rows):
        return np.exp(-1j * np.multiply.outer(t[rows], nodes)) @ phi

    integral = np.concatenate(
        run_parallel(integrate_chunk, chunks, workers=workers, prefer="threads")
    ) * (step / (2.0 * math.pi))

    residual = np.abs(integral.imag)
    if np.any(residual >= IMAG_TOL * (1.0 + np.abs(integral.real))):
        worst = int(np.argmax(residual))
        raise InternalConsistencyError(
            f"inversion is not real at t={t[worst]:.6g} "
            f"(imaginary part {integral.imag[worst]:.3e})"
        )

    return DensityEstimate(grid=t, values=integral.real, params=params)


def clip(est: DensityEstimate) -> DensityEstimate:
    """max(0, f)."""
    return DensityEstimate(
        grid=est.grid,
        values=np.maximum(est.values, 0.0),
        params=est.params,
        clipped=True,
    )


def l2_loss(est: DensityEstimate, truth) -> float:
    """Riemann sum of (f_hat - f)^2 on the estimate's grid."""
    target = truth.density(est.grid)
    return float(np.sum((est.values - target) ** 2) * est.spacing)


def l2_distance(first: DensityEstimate, second: DensityEstimate) -> float:
    """L2 norm of the difference of two estimates on a common grid."""
    if not first.same_grid(second):
        raise ParameterDomainError("estimates live on different evaluation grids")
    return float(np.sqrt(np.sum((first.values - second.values) ** 2) * first.spacing))


def theoretical_params(
    n: int,
    rho: float,
    S: float,
    c_h: float,
    d: int = 1,
    nu_est: float = 1.0,
) -> EstimatorParams:
    """
    m = floor(rho / 4 * ln n / ln ln n) and h = c_h m^(1 / rho) / S, with
    c_h <= exp(-(5d + 3) / 2). nu_est is passed through.
    """
    if n < 16:
        raise ParameterDomainError(f"n must be >= 16 for ln ln n > 0, got {n}")
    if rho < 1:
        raise ParameterDomainError(f"rho must be >= 1, got {rho}")
    if S <= 0:
        raise ParameterDomainError(f"S must be > 0, got {S}")
    if d != 1:
        raise ParameterDomainError("only one-dimensional signals are supported")
    c_max = math.exp(-(5 * d + 3) / 2)
    if not 0 < c_h <= c_max:
        raise ParameterDomainError(f"c_h must lie in (0, {c_max:.6g}], got {c_h}")

    m = math.floor(rho / 4.0 * math.log(n) / math.log(math.log(n)))
    if m == 0:
        raise DegenerateParametersError(
            f"n={n}, rho={rho} give m=0; supply m explicitly"
        )
    h = c_h * m ** (1.0 / rho) / S
    return EstimatorParams(m=m, nu_est=nu_est, h=h)


def cf_distance(p: PolyCF, law, nu: float, points: int = 2001) -> float:
    """L2 distance on [-nu, nu] between p and the characteristic function of `law`."""
    t = np.linspace(-nu, nu, points)
    gap = np.abs(evaluate(p, t) - law.cf(t)) ** 2
    return float(np.sqrt(integrate.trapezoid(gap, t)))


def write_estimate(est: DensityEstimate, path: Union[str, Path]) -> Path:
    """Writes "t,value" CSV and a JSON sidecar holding the parameters."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame({"t": est.grid, "value": est.values}).to_csv(
        path, index=False, lineterminator="\n"
    )
    save_json_file(
        {
            "params": est.params.model_dump() if est.params else None,
            "clipped": est.clipped,
            "points": int(est.grid.size),
            "window": [float(est.grid[0]), float(est.grid[-1])],
        },
        path.with_suffix(".json"),
    )
    logger.debug(f"Density estimate written to {path}")
    return path
