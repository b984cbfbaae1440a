"""The deconvolution estimator: ECF, criterion, CF fit and Fourier inversion."""

from .cf_model import (
    PolyCF,
    UpsilonBound,
    clamp_to_upsilon,
    evaluate,
    fit_degree,
    project_cf,
    truncate,
)
from .criterion import (
    CriterionContext,
    QuadGrid,
    build_context,
    criterion_gradient,
    criterion_value,
)
from .density import (
    DensityEstimate,
    EstimatorParams,
    cf_distance,
    clip,
    invert,
    l2_distance,
    l2_loss,
    theoretical_params,
    write_estimate,
)
from .ecf import (
    EcfTable,
    PairedSample,
    ecf_at,
    ecf_table,
    read_paired_csv,
    write_paired_csv,
)
from .optimizer import FitResult, OptimizerConfig, fit_cf, fit_cf_over_degrees
from .pipeline import EstimationPipeline

__all__ = [
    "CriterionContext",
    "DensityEstimate",
    "EcfTable",
    "EstimationPipeline",
    "EstimatorParams",
    "FitResult",
    "OptimizerConfig",
    "PairedSample",
    "PolyCF",
    "QuadGrid",
    "UpsilonBound",
    "build_context",
    "cf_distance",
    "clamp_to_upsilon",
    "clip",
    "criterion_gradient",
    "criterion_value",
    "ecf_at",
    "ecf_table",
    "evaluate",
    "fit_cf",
    "fit_cf_over_degrees",
    "fit_degree",
    "invert",
    "l2_distance",
    "l2_loss",
    "project_cf",
    "read_paired_csv",
    "theoretical_params",
    "truncate",
    "write_estimate",
    "write_paired_csv",
]
