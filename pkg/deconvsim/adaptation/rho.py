"""Goldenshluger-Lepski selection of the tail exponent rho."""

import math
from typing import Dict, Mapping, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from deconvsim.estimator.density import DensityEstimate, l2_distance
from deconvsim.exceptions import ParameterDomainError

# rho values closer than this are the same grid point
RHO_TOL = 1e-12


class RhoGrid(BaseModel):
    """Candidate exponents rho_1 < ... < rho_0 with the variance-bound constants."""

    model_config = ConfigDict(frozen=True)

    rhos: Tuple[float, ...]
    beta: float = Field(gt=0)
    c_sigma: float = Field(1.0, gt=0)
    n: int = Field(ge=1)

    @field_validator("rhos")
    @classmethod
    def check_rhos(cls, rhos):
        if not rhos:
            raise ValueError("rho grid must not be empty")
        if any(r < 1 for r in rhos):
            raise ValueError(f"every rho must be >= 1, got {rhos}")
        if any(b <= a for a, b in zip(rhos, rhos[1:])):
            raise ValueError(f"rho grid must be strictly increasing, got {rhos}")
        return rhos

    @property
    def rho0(self) -> float:
        return self.rhos[-1]


def rate_base(n: int) -> float:
    """ln ln n / ln n, in (0, 1) for n >= 16."""
    if n < 16:
        raise ParameterDomainError(f"n must be >= 16 for ln ln n > 0, got {n}")
    return math.log(math.log(n)) / math.log(n)


def sigma_n(g: RhoGrid, rho: float) -> float:
    """c_sigma (ln ln n / ln n)^(2 beta / rho)."""
    if not 1.0 - RHO_TOL <= rho <= g.rho0 + RHO_TOL:
        raise ParameterDomainError(f"rho={rho} outside [1, {g.rho0}]")
    return g.c_sigma * rate_base(g.n) ** (2.0 * g.beta / rho)


def _ordered_estimates(
    fits: Mapping[float, DensityEstimate], g: RhoGrid
) -> Dict[float, DensityEstimate]:
    if sorted(fits) != list(g.rhos):
        raise ParameterDomainError(
            f"estimates given for rho={sorted(fits)}, grid is {list(g.rhos)}"
        )
    reference = fits[g.rhos[0]]
    for rho in g.rhos[1:]:
        if not fits[rho].same_grid(reference):
            raise ParameterDomainError(
                f"estimate for rho={rho} uses a different evaluation grid"
            )
    return {rho: fits[rho] for rho in g.rhos}


def select_rho(
    fits: Mapping[float, DensityEstimate], g: RhoGrid
) -> Tuple[float, Dict[float, float]]:
    """
    A_n(rho) = max(0, max over rho' >= rho of ||f_rho' - f_rho|| - sigma_n(rho'))
    and rho_hat = argmin A_n + sigma_n, ties going to the smallest rho.
    """
    estimates = _ordered_estimates(fits, g)
    sigmas = {rho: sigma_n(g, rho) for rho in g.rhos}

    a_values = {}
    for i, rho in enumerate(g.rhos):
        worst = 0.0
        for other in g.rhos[i + 1 :]:
            gap = l2_distance(estimates[other], estimates[rho]) - sigmas[other]
            worst = max(worst, gap)
        a_values[rho] = worst

    rho_hat = g.rhos[0]
    for rho in g.rhos[1:]:
        if a_values[rho] + sigmas[rho] < a_values[rho_hat] + sigmas[rho_hat]:
            rho_hat = rho
    return rho_hat, a_values


def rho_table(a_values: Mapping[float, float], g: RhoGrid) -> pd.DataFrame:
    """rho, A_n, sigma_n and their sum, one row per grid point."""
    rows = [
        {
            "rho": rho,
            "a_n": a_values[rho],
            "sigma_n": sigma_n(g, rho),
        }
        for rho in g.rhos
    ]
    frame = pd.DataFrame(rows)
    frame["total"] = frame["a_n"] + frame["sigma_n"]
    return frame
