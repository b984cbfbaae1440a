"""Signal and noise laws, and the scenario catalog built from them."""

import numpy as np

from .catalog import (
    CATALOG_NAMES,
    LawSpec,
    ScenarioSpec,
    catalog_scenario,
    default_window,
    draw_sample,
    evaluation_grid,
)
from .laws import (
    Beta22,
    BilateralGamma,
    DiracUniformMix,
    Gamma,
    Gaussian,
    GaussianMixture,
    Laplace,
    Law,
    ShiftedGamma,
    Uniform,
)


def sample(law: Law, n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. draws from `law`."""
    return law.sample(n, rng)


def density(law: Law, t):
    """Density of `law` at t; a float for scalar t."""
    values = law.density(t)
    return float(values) if np.ndim(values) == 0 else values


def cf(law: Law, t):
    """Characteristic function of `law` at t; a complex for scalar t."""
    values = law.cf(t)
    return complex(values) if np.ndim(values) == 0 else values


def moments(law: Law, k: int) -> np.ndarray:
    """Raw moments mu_0..mu_k of `law`."""
    return law.moments(k)


__all__ = [
    "Beta22",
    "BilateralGamma",
    "CATALOG_NAMES",
    "DiracUniformMix",
    "Gamma",
    "Gaussian",
    "GaussianMixture",
    "Laplace",
    "Law",
    "LawSpec",
    "ScenarioSpec",
    "ShiftedGamma",
    "Uniform",
    "catalog_scenario",
    "cf",
    "default_window",
    "density",
    "draw_sample",
    "evaluation_grid",
    "moments",
    "sample",
]
