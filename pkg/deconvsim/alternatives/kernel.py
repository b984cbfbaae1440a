"""Kernel density baseline on the averaged coordinates."""

import logging

import numpy as np
from scipy import stats

from deconvsim.alternatives.base import AlternativeEstimator
from deconvsim.estimator.density import DensityEstimate
from deconvsim.estimator.ecf import PairedSample

logger = logging.getLogger("deconvsim")


class KernelBaseline(AlternativeEstimator):
    """
    Gaussian kernel density of (Y1 + Y2) / 2 with Silverman's normal reference
    bandwidth. It ignores the noise entirely and only exists to exercise the
    combination rule.
    """

    def __init__(self, settings=None):
        self.settings = settings

    def estimate(self, sample: PairedSample, eval_grid) -> DensityEstimate:
        averaged = 0.5 * (sample.y1 + sample.y2)
        if np.ptp(averaged) == 0:
            raise ValueError("kernel baseline needs non-constant observations")

        kde = stats.gaussian_kde(averaged, bw_method="silverman")
        grid = np.asarray(eval_grid, dtype=float)
        logger.debug(f"KernelBaseline bandwidth factor {kde.factor:.4f}.")
        return DensityEstimate(grid=grid, values=kde(grid), clipped=True)
