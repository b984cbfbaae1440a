"""Scenario catalog: the signal/noise pairs of the simulation studies."""

from typing import Annotated, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from deconvsim.distributions.laws import (
    Beta22,
    BilateralGamma,
    DiracUniformMix,
    Gamma,
    Gaussian,
    GaussianMixture,
    Laplace,
    ShiftedGamma,
    Uniform,
)
from deconvsim.estimator.ecf import PairedSample

LawSpec = Annotated[
    Union[
        Gaussian,
        Laplace,
        Beta22,
        Uniform,
        DiracUniformMix,
        Gamma,
        ShiftedGamma,
        BilateralGamma,
        GaussianMixture,
    ],
    Field(discriminator="kind"),
]

ScenarioName = Literal[
    "I", "II", "III", "IV", "V", "VI", "CK1", "CK2", "CK3", "CK4", "custom"
]

# the first six use n=500, the comparison scenarios n=1000
_CATALOG = {
    "I": (Gaussian(), Gaussian(), 500),
    "II": (Gaussian(), Laplace(), 500),
    "III": (Gaussian(), DiracUniformMix(), 500),
    "IV": (Beta22(), Gaussian(), 500),
    "V": (Beta22(), Laplace(), 500),
    "VI": (Beta22(), DiracUniformMix(), 500),
    "CK1": (
        Gamma(shape=4, rate=2),
        BilateralGamma(alpha=2, beta=2, gamma=3, delta=3),
        1000,
    ),
    "CK2": (
        BilateralGamma(alpha=1, beta=1, gamma=2, delta=2),
        ShiftedGamma(shape=4, rate=2, shift=-2),
        1000,
    ),
    "CK3": (Gaussian(), BilateralGamma(alpha=2, beta=2, gamma=3, delta=3), 1000),
    "CK4": (Gaussian(), GaussianMixture(m1=-2, s1=1, m2=2, s2=2, w=0.5), 1000),
}

CATALOG_NAMES = tuple(_CATALOG)


class ScenarioSpec(BaseModel):
    """Named signal/noise pair; the same noise law is drawn for both coordinates."""

    model_config = ConfigDict(frozen=True)

    name: ScenarioName = "custom"
    signal: LawSpec
    noise: LawSpec
    n: int = Field(ge=1)
    seed: int = Field(0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def check_signal(self):
        if not self.signal.has_density:
            raise ValueError(f"signal law {self.signal.kind} has no density")
        return self


def catalog_scenario(name: str, n: Optional[int] = None, seed: int = 0) -> ScenarioSpec:
    """Catalog scenario `name`, optionally overriding its sample size."""
    if name not in _CATALOG:
        raise ValueError(
            f"Unknown scenario '{name}', expected one of {list(CATALOG_NAMES)}"
        )
    signal, noise, default_n = _CATALOG[name]
    return ScenarioSpec(
        name=name,
        signal=signal,
        noise=noise,
        n=default_n if n is None else n,
        seed=seed,
    )


def default_window(spec: ScenarioSpec) -> Tuple[float, float]:
    """Evaluation window of the density estimate for a scenario's signal."""
    signal = spec.signal
    if isinstance(signal, Gaussian) and spec.name.startswith("CK"):
        return -3.0, 3.0
    if isinstance(signal, Gaussian) and spec.name != "custom":
        return -5.0, 5.0
    if isinstance(signal, Beta22):
        return -1.0, 2.0
    if isinstance(signal, Gamma):
        return -5.0, 10.0
    if isinstance(signal, BilateralGamma):
        return -5.0, 5.0

    center = signal.first_moment()
    spread = 6.0 * signal.standard_deviation()
    return center - spread, center + spread


def evaluation_grid(spec: ScenarioSpec, points: int) -> np.ndarray:
    """Regular grid of `points` abscissae spanning the scenario window."""
    low, high = default_window(spec)
    return np.linspace(low, high, points)


def draw_sample(spec: ScenarioSpec, rng: np.random.Generator) -> PairedSample:
    """(X + eps1, X + eps2) with X, eps1 and eps2 independent."""
    signal = spec.signal.sample(spec.n, rng)
    noise_1 = spec.noise.sample(spec.n, rng)
    noise_2 = spec.noise.sample(spec.n, rng)
    return PairedSample(y1=signal + noise_1, y2=signal + noise_2)
