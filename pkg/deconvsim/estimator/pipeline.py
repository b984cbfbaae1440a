"""End-to-end estimation: ECF table, CF fit, truncation, inversion, clipping."""

import logging
from typing import Dict, Optional, Tuple

from deconvsim.estimator.criterion import CriterionContext, QuadGrid, build_context
from deconvsim.estimator.density import DensityEstimate, EstimatorParams, clip, invert
from deconvsim.estimator.ecf import PairedSample
from deconvsim.estimator.optimizer import FitResult, OptimizerConfig, fit_cf

logger = logging.getLogger("deconvsim")


class EstimationPipeline:
    """
    Density estimates of one sample for any number of (m, nu_est, h) triples.

    Criterion contexts are cached per nu_est and fits per (nu_est, fit degree),
    so a sweep over h or over m with a fixed fit degree reuses them. The cache
    is dropped whenever a different sample is passed in.
    """

    def __init__(
        self,
        optimizer: OptimizerConfig,
        nodes: int = 500,
        fit_degree: Optional[int] = None,
        quad_points: int = 4096,
        partitions: int = 1,
        workers: int = 1,
        oracle_law=None,
    ):
        self.optimizer = optimizer
        self.nodes = nodes
        self.fit_degree = fit_degree
        self.quad_points = quad_points
        self.partitions = partitions
        self.workers = workers
        self.oracle_law = oracle_law

        self._sample = None
        self._contexts: Dict[float, CriterionContext] = {}
        self._fits: Dict[Tuple[float, int], FitResult] = {}

    def _bind(self, sample: PairedSample):
        if sample is not self._sample:
            self._sample = sample
            self._contexts.clear()
            self._fits.clear()

    def context(self, sample: PairedSample, nu_est: float) -> CriterionContext:
        self._bind(sample)
        if nu_est not in self._contexts:
            grid = QuadGrid.square(nu_est, self.nodes)
            self._contexts[nu_est] = build_context(
                sample, grid, partitions=self.partitions, workers=self.workers
            )
        return self._contexts[nu_est]

    def degree_for(self, params: EstimatorParams) -> int:
        """Fit degree: the configured one, else the truncation degree."""
        return params.m if self.fit_degree is None else self.fit_degree

    def fit_key(self, params: EstimatorParams) -> Tuple[float, int]:
        """Triples with equal keys share one CF fit."""
        return params.nu_est, self.degree_for(params)

    def spawn(self) -> "EstimationPipeline":
        """A pipeline with the same settings and empty caches."""
        return EstimationPipeline(
            self.optimizer,
            nodes=self.nodes,
            fit_degree=self.fit_degree,
            quad_points=self.quad_points,
            partitions=self.partitions,
            workers=self.workers,
            oracle_law=self.oracle_law,
        )

    def fit(self, sample: PairedSample, params: EstimatorParams) -> FitResult:
        ctx = self.context(sample, params.nu_est)
        key = self.fit_key(params)
        if key not in self._fits:
            self._fits[key] = fit_cf(ctx, key[1], self.optimizer, self.oracle_law)
        return self._fits[key]

    def run(
        self, sample: PairedSample, params: EstimatorParams, eval_grid
    ) -> Tuple[DensityEstimate, FitResult]:
        """max(0, f_hat) on eval_grid, with the fit it came from."""
        result = self.fit(sample, params)
        raw = invert(
            result.phi_hat,
            params,
            eval_grid,
            quad_points=self.quad_points,
            workers=self.workers,
        )
        logger.debug(f"Estimate {params} done (M_n={result.objective:.3e}).")
        return clip(raw), result

    def __call__(self, sample: PairedSample, params: EstimatorParams, eval_grid):
        return self.run(sample, params, eval_grid)[0]
