"""Run specifications of the simulation harness, loadable from YAML or JSON."""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from deconvsim.distributions import CATALOG_NAMES, ScenarioSpec, catalog_scenario
from deconvsim.estimator import EstimatorParams, OptimizerConfig

DEFAULT_M = list(range(3, 16))
DEFAULT_H = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
DEFAULT_NU = [0.33, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5]


def _scenario(value):
    """A catalog name, a {name, n, seed} reference or a full scenario."""
    if isinstance(value, str):
        return catalog_scenario(value)
    if isinstance(value, dict) and "signal" not in value:
        name = value.get("name")
        if name not in CATALOG_NAMES:
            raise ValueError(f"Unknown scenario '{name}'")
        return catalog_scenario(name, n=value.get("n"), seed=value.get("seed", 0))
    return value


def _params(value):
    """[m, nu_est, h] triples are accepted next to mappings."""
    if isinstance(value, (list, tuple)):
        m, nu_est, h = value
        return EstimatorParams(m=m, nu_est=nu_est, h=h)
    return value


class SweepSpec(BaseModel):
    """Loss table over m x nu_est x h on one dataset."""

    model_config = ConfigDict(frozen=True)

    scenario: ScenarioSpec
    m_list: List[int] = Field(default_factory=lambda: list(DEFAULT_M), min_length=1)
    nu_list: List[float] = Field(default_factory=lambda: list(DEFAULT_NU), min_length=1)
    h_list: List[float] = Field(default_factory=lambda: list(DEFAULT_H), min_length=1)
    nodes: Optional[int] = Field(None, ge=2)
    eval_points: Optional[int] = Field(None, ge=2)
    optimizer: OptimizerConfig = OptimizerConfig()
    output_path: Optional[str] = None

    @field_validator("scenario", mode="before")
    @classmethod
    def resolve_scenario(cls, value):
        return _scenario(value)

    @field_validator("m_list")
    @classmethod
    def check_degrees(cls, values):
        if any(m < 0 for m in values):
            raise ValueError("degrees must be >= 0")
        return values

    @field_validator("nu_list", "h_list")
    @classmethod
    def check_positive(cls, values):
        if any(v <= 0 for v in values):
            raise ValueError("nu_est and h values must be > 0")
        return values

    @property
    def cells(self) -> List[EstimatorParams]:
        """Every (m, nu_est, h) of the cross product, m outermost."""
        return [
            EstimatorParams(m=m, nu_est=nu, h=h)
            for m in self.m_list
            for nu in self.nu_list
            for h in self.h_list
        ]


class RiskSpec(BaseModel):
    """Monte-Carlo empirical risk with the best of up to four parameter sets."""

    model_config = ConfigDict(frozen=True)

    scenario: ScenarioSpec
    repetitions: int = Field(500, ge=1)
    n: Optional[int] = Field(None, ge=1)
    param_sets: List[EstimatorParams] = Field(min_length=1, max_length=4)
    base_seed: int = Field(0, ge=0)
    nodes: Optional[int] = Field(None, ge=2)
    eval_points: Optional[int] = Field(None, ge=2)
    optimizer: OptimizerConfig = OptimizerConfig()
    output_path: Optional[str] = None

    @field_validator("scenario", mode="before")
    @classmethod
    def resolve_scenario(cls, value):
        return _scenario(value)

    @field_validator("param_sets", mode="before")
    @classmethod
    def as_params(cls, values):
        return [_params(v) for v in values]

    @property
    def sized_scenario(self) -> ScenarioSpec:
        """The scenario with `n` applied when given."""
        if self.n is None:
            return self.scenario
        return self.scenario.model_copy(update={"n": self.n})
