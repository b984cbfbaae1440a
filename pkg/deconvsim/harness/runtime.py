"""Run-level settings resolved from config.ini, the run mode and CLI flags."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from deconvsim.config import resolve_mode
from deconvsim.estimator import EstimationPipeline, OptimizerConfig


class RunSettings(BaseModel):
    """Everything a harness command needs besides its own inputs."""

    model_config = ConfigDict(frozen=True)

    mode: str = "desk"
    nodes: int = Field(500, ge=2)
    eval_points: int = Field(2000, ge=2)
    quad_points: int = Field(4096, ge=64)
    partitions: int = Field(4, ge=1)
    workers: int = Field(1, ge=1)
    seed: int = Field(0, ge=0)
    fit_degree: int = Field(15, ge=0)
    noise_q_limit: float = Field(50.0, gt=0)
    noise_cf_floor: float = Field(0.05, gt=0)
    c_sigma: float = Field(1.0, gt=0)
    c_adapt: float = Field(1.0, gt=0)
    floor_eps: float = Field(1e-8, gt=0)
    split_e1: float = Field(0.4, gt=0, lt=1)
    split_e2: float = Field(0.4, gt=0, lt=1)
    alternative: str = "KernelBaseline"
    optimizer: OptimizerConfig = OptimizerConfig()

    @classmethod
    def from_config(
        cls,
        settings,
        mode: str = "desk",
        workers: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> "RunSettings":
        """Reads the ini sections; explicit workers and seed win over the file."""
        nodes, points = resolve_mode(settings, mode)
        harness = settings["Harness"]
        estimator = settings["Estimator"]
        adaptation = settings["Adaptation"]
        seed = harness.getint("SEED") if seed is None else seed
        return cls(
            mode=mode,
            nodes=nodes,
            eval_points=points,
            quad_points=estimator.getint("INVERSION_QUAD_POINTS"),
            partitions=settings["Criterion"].getint("PARTITIONS"),
            workers=harness.getint("WORKERS") if workers is None else workers,
            seed=seed,
            fit_degree=estimator.getint("FIT_DEGREE"),
            noise_q_limit=estimator.getfloat("NOISE_Q_LIMIT"),
            noise_cf_floor=estimator.getfloat("NOISE_CF_FLOOR"),
            c_sigma=adaptation.getfloat("C_SIGMA"),
            c_adapt=adaptation.getfloat("C_ADAPT"),
            floor_eps=adaptation.getfloat("FLOOR_EPS"),
            split_e1=adaptation.getfloat("SPLIT_E1"),
            split_e2=adaptation.getfloat("SPLIT_E2"),
            alternative=harness.get("ALTERNATIVE"),
            optimizer=OptimizerConfig.from_settings(settings, seed=seed),
        )

    def pipeline(
        self,
        optimizer: Optional[OptimizerConfig] = None,
        nodes: Optional[int] = None,
        fit_degree: Optional[int] = None,
        oracle_law=None,
        workers: int = 1,
    ) -> EstimationPipeline:
        """A pipeline on these settings; `fit_degree=None` fits at degree m."""
        return EstimationPipeline(
            optimizer or self.optimizer,
            nodes=nodes or self.nodes,
            fit_degree=fit_degree,
            quad_points=self.quad_points,
            partitions=self.partitions,
            workers=workers,
            oracle_law=oracle_law,
        )
