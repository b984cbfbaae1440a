"""Threshold combination of the main estimate with an alternative estimator."""

from typing import Literal, Tuple

from pydantic import BaseModel, ConfigDict, Field

from deconvsim.adaptation.rho import rate_base
from deconvsim.estimator.density import DensityEstimate, l2_distance

Branch = Literal["alt", "main"]


class CombinationConfig(BaseModel):
    """C_adapt and the (beta, rho) entering the threshold exponent."""

    model_config = ConfigDict(frozen=True)

    c_adapt: float = Field(1.0, gt=0)
    beta: float = Field(gt=0)
    rho: float = Field(ge=1)


def combination_threshold(cfg: CombinationConfig, n: int) -> float:
    """C_adapt (ln ln n / ln n)^(2 beta / rho)."""
    return cfg.c_adapt * rate_base(n) ** (2.0 * cfg.beta / cfg.rho)


def squared_distance(first: DensityEstimate, second: DensityEstimate) -> float:
    return l2_distance(first, second) ** 2


def combine(
    f_main: DensityEstimate, f_alt: DensityEstimate, cfg: CombinationConfig, n: int
) -> Tuple[DensityEstimate, Branch]:
    """The alternative when ||f_main - f_alt||^2 <= threshold, else the main estimate."""
    if squared_distance(f_main, f_alt) <= combination_threshold(cfg, n):
        return f_alt, "alt"
    return f_main, "main"
