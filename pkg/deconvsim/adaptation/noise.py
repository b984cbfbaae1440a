"""
Noise density plug-in: the noise characteristic function of one coordinate is
estimated as the ratio of the marginal ECF to the fitted signal CF, then
Fourier-inverted on [-q, q].
"""

import logging

import numpy as np

from deconvsim.estimator.cf_model import PolyCF, evaluate
from deconvsim.estimator.density import DensityEstimate, EstimatorParams, clip, invert
from deconvsim.estimator.ecf import PairedSample, marginal_ecf
from deconvsim.exceptions import ParameterDomainError

logger = logging.getLogger("deconvsim")


def noise_cf_ratio(
    sample: PairedSample, phi_hat, coordinate: int, cf_floor: float = 0.05
):
    """
    Callable u -> estimated noise CF. The ratio is set to 0 where |phi_hat| is
    below cf_floor and its modulus is capped at 1.
    """

    def ratio(u):
        u = np.asarray(u, dtype=float)
        signal = evaluate(phi_hat, u) if isinstance(phi_hat, PolyCF) else phi_hat(u)
        signal = np.asarray(signal, dtype=complex)
        marginal = marginal_ecf(sample, u, coordinate)

        valid = np.abs(signal) >= cf_floor
        values = np.zeros(u.shape, dtype=complex)
        values[valid] = marginal[valid] / signal[valid]
        modulus = np.abs(values)
        capped = modulus > 1.0
        values[capped] /= modulus[capped]
        return values

    return ratio


def estimate_noise_density(
    sample: PairedSample,
    phi_hat,
    coordinate: int,
    q: float,
    eval_grid,
    q_limit: float = 50.0,
    cf_floor: float = 0.05,
    quad_points: int = 4096,
) -> DensityEstimate:
    """Clipped density estimate of the noise of `coordinate` (1 or 2)."""
    if q <= 0:
        raise ParameterDomainError(f"cutoff q must be > 0, got {q}")
    if q > q_limit:
        raise ParameterDomainError(f"cutoff q={q} exceeds the limit {q_limit}")
    sample.coordinate(coordinate)

    ratio = noise_cf_ratio(sample, phi_hat, coordinate, cf_floor)
    params = EstimatorParams(m=0, nu_est=1.0, h=q)
    raw = invert(ratio, params, eval_grid, quad_points=quad_points)
    estimate = clip(raw)
    return DensityEstimate(grid=estimate.grid, values=estimate.values, clipped=True)


def _resample(est: DensityEstimate, step: float):
    count = int(np.floor((est.grid[-1] - est.grid[0]) / step + 1e-9)) + 1
    grid = est.grid[0] + np.arange(count) * step
    return grid, np.interp(grid, est.grid, est.values)


def convolve_densities(
    first: DensityEstimate, second: DensityEstimate
) -> DensityEstimate:
    """
    Density of the sum of two independent variables. Both factors are linearly
    interpolated on a common step and combined with trapezoid weights.
    """
    step = min(first.spacing, second.spacing)
    grid_1, values_1 = _resample(first, step)
    grid_2, values_2 = _resample(second, step)

    weights = np.ones_like(values_2)
    weights[[0, -1]] = 0.5
    values = np.convolve(values_1, weights * values_2) * step
    grid = grid_1[0] + grid_2[0] + np.arange(values.size) * step
    return DensityEstimate(grid=grid, values=np.maximum(values, 0.0), clipped=True)


def density_at(est: DensityEstimate, points) -> np.ndarray:
    """Linear interpolation of the estimate, 0 outside its grid."""
    return np.interp(np.asarray(points, dtype=float), est.grid, est.values, 0.0, 0.0)
