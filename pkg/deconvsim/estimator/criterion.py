"""
Contrast criterion M_n on [-nu, nu]^2:

    M_n(phi) = sum over nodes |phi(t1 + t2) phi_n(t1, 0) phi_n(0, t2)
                               - phi_n(t1, t2) phi(t1) phi(t2)|^2 * cell weight

where phi_n is the empirical characteristic function of the paired sample.
"""

import logging
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from deconvsim.estimator.cf_model import PolyCF, evaluate
from deconvsim.estimator.ecf import EcfTable, PairedSample, ecf_table
from deconvsim.exceptions import ParameterDomainError
from deconvsim.utils.common import run_parallel

logger = logging.getLogger("deconvsim")


class QuadGrid(BaseModel):
    """Regular midpoint grid on [-nu, nu]^2 with k1 x k2 cells."""

    model_config = ConfigDict(frozen=True)

    nu: float = Field(gt=0)
    k1: int = Field(ge=2)
    k2: int = Field(ge=2)
    rule: Literal["midpoint-riemann"] = "midpoint-riemann"

    @classmethod
    def square(cls, nu: float, nodes: int) -> "QuadGrid":
        return cls(nu=nu, k1=nodes, k2=nodes)

    @property
    def step1(self) -> float:
        return 2.0 * self.nu / self.k1

    @property
    def step2(self) -> float:
        return 2.0 * self.nu / self.k2

    @property
    def cell_weight(self) -> float:
        return self.step1 * self.step2

    def nodes1(self) -> np.ndarray:
        return -self.nu + (np.arange(self.k1) + 0.5) * self.step1

    def nodes2(self) -> np.ndarray:
        return -self.nu + (np.arange(self.k2) + 0.5) * self.step2


class CriterionContext(BaseModel):
    """ECF table of one sample on one grid, plus the t1 + t2 lookup."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    table: EcfTable
    grid: QuadGrid
    n: int
    partitions: int = 1
    workers: int = 1
    # distinct values of t1 + t2 and, per node pair, the index into them;
    # None when the two axes have different steps
    sumgrid: Optional[np.ndarray] = None
    sum_index: Optional[np.ndarray] = None


def build_context(
    sample: PairedSample, grid: QuadGrid, partitions: int = 1, workers: int = 1
) -> CriterionContext:
    """Tabulates the ECF on `grid` and prepares the t1 + t2 de-duplication."""
    if partitions < 1:
        raise ParameterDomainError(f"partitions must be >= 1, got {partitions}")

    table = ecf_table(sample, grid, partitions=partitions, workers=workers)

    sumgrid = sum_index = None
    if np.isclose(grid.step1, grid.step2, rtol=0.0, atol=1e-12):
        # t1_i + t2_j = t1_0 + t2_0 + (i + j) * step
        count = grid.k1 + grid.k2 - 1
        sumgrid = table.grid1[0] + table.grid2[0] + np.arange(count) * grid.step1
        sum_index = np.add.outer(np.arange(grid.k1), np.arange(grid.k2))
    else:
        logger.debug("Axes have different steps, t1 + t2 evaluated per node pair.")

    return CriterionContext(
        table=table,
        grid=grid,
        n=sample.n,
        partitions=partitions,
        workers=workers,
        sumgrid=sumgrid,
        sum_index=sum_index,
    )


def criterion_value(
    ctx: CriterionContext, p: PolyCF, use_sum_cache: bool = True
) -> float:
    """
    Riemann sum of the contrast integrand. The t1 axis is split into
    ctx.partitions row blocks whose partial sums are added in block order.
    """
    table = ctx.table
    phi1 = evaluate(p, table.grid1)
    phi2 = evaluate(p, table.grid2)

    cached = use_sum_cache and ctx.sum_index is not None
    phi_sums = evaluate(p, ctx.sumgrid) if cached else None

    def partial(rows):
        if cached:
            phi_sum = phi_sums[ctx.sum_index[rows]]
        else:
            phi_sum = evaluate(p, np.add.outer(table.grid1[rows], table.grid2))
        factorized = phi_sum * np.multiply.outer(table.marginal1[rows], table.marginal2)
        joint = table.values[rows] * np.multiply.outer(phi1[rows], phi2)
        residual = factorized - joint
        return np.sum(residual.real**2 + residual.imag**2)

    blocks = np.array_split(
        np.arange(table.grid1.size), max(1, min(ctx.partitions, table.grid1.size))
    )
    partials = run_parallel(partial, blocks, workers=ctx.workers, prefer="threads")

    total = 0.0
    for value in partials:
        total += value
    return float(total * ctx.grid.cell_weight)


def criterion_from_stored(ctx: CriterionContext, stored: np.ndarray) -> float:
    """M_n as a function of the free real parameters."""
    return criterion_value(ctx, PolyCF.from_stored(stored))


def criterion_gradient(
    ctx: CriterionContext, p: PolyCF, h_fd: float = 1e-6
) -> np.ndarray:
    """Central differences of M_n in the stored parameters, relative step h_fd."""
    if h_fd <= 0:
        raise ParameterDomainError(f"finite-difference step must be > 0, got {h_fd}")

    theta = p.stored
    gradient = np.zeros(p.m)
    for k in range(p.m):
        step = h_fd * max(1.0, abs(theta[k]))
        forward = theta.copy()
        backward = theta.copy()
        forward[k] += step
        backward[k] -= step
        gradient[k] = (
            criterion_from_stored(ctx, forward) - criterion_from_stored(ctx, backward)
        ) / (2.0 * step)
    return gradient
