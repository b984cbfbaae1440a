"""Data-driven choices: rho selection, combination and cross-validation."""

from .combine import CombinationConfig, combination_threshold, combine
from .cv import CvConfig, CvSplit, cross_validate, cv_frame, q_grid, split_indices
from .noise import convolve_densities, estimate_noise_density
from .rho import RhoGrid, rho_table, select_rho, sigma_n

__all__ = [
    "CombinationConfig",
    "CvConfig",
    "CvSplit",
    "RhoGrid",
    "combination_threshold",
    "combine",
    "convolve_densities",
    "cross_validate",
    "cv_frame",
    "estimate_noise_density",
    "q_grid",
    "rho_table",
    "select_rho",
    "sigma_n",
    "split_indices",
]
