"""
Signal and noise laws of the simulation catalog.

Every law is an immutable pydantic model exposing a sampler, a density (when it
has one), its characteristic function in closed form and its raw moments. The
moments feed the oracle initialization of the optimizer, the characteristic
functions are the ground truth the estimator is compared against.
"""

from abc import ABC, abstractmethod
from functools import lru_cache
from typing import ClassVar, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import integrate, special, stats

from deconvsim.exceptions import NoDensityError, ParameterDomainError

# below this |t| the closed forms with a 1/t^k factor lose digits; use the series
SMALL_T = 0.1
SERIES_DEGREE = 16

BILATERAL_STEP = 0.005
BILATERAL_PDF_CUTOFF = 1e-12


def _as_array(t) -> np.ndarray:
    return np.asarray(t, dtype=float)


def _shift_moments(moments: np.ndarray, shift: float) -> np.ndarray:
    """Raw moments of Z + shift from the raw moments of Z."""
    k = len(moments) - 1
    shifted = np.zeros(k + 1)
    for order in range(k + 1):
        j = np.arange(order + 1)
        shifted[order] = np.sum(
            special.comb(order, j) * moments[: order + 1] * shift ** (order - j)
        )
    return shifted


def _series_cf(t: np.ndarray, moments: np.ndarray) -> np.ndarray:
    """Taylor expansion sum_k mu_k (it)^k / k! of a characteristic function."""
    result = np.zeros(t.shape, dtype=complex)
    for order in range(len(moments) - 1, -1, -1):
        result = result * (1j * t) / (order + 1) + moments[order]
    return result


def _uniform_moments(a: float, b: float, k: int) -> np.ndarray:
    orders = np.arange(k + 1)
    return (b ** (orders + 1) - a ** (orders + 1)) / ((orders + 1) * (b - a))


def _uniform_cf(t: np.ndarray, a: float, b: float) -> np.ndarray:
    small = np.abs(t) < SMALL_T
    safe = np.where(small, 1.0, t)
    closed = (np.exp(1j * safe * b) - np.exp(1j * safe * a)) / (1j * safe * (b - a))
    series = _series_cf(t, _uniform_moments(a, b, SERIES_DEGREE))
    return np.where(small, series, closed)


def _gaussian_moments(mean: float, sd: float, k: int) -> np.ndarray:
    moments = np.zeros(k + 1)
    moments[0] = 1.0
    if k >= 1:
        moments[1] = mean
    for order in range(2, k + 1):
        moments[order] = (
            mean * moments[order - 1] + (order - 1) * sd**2 * moments[order - 2]
        )
    return moments


def _gamma_moments(shape: float, rate: float, k: int) -> np.ndarray:
    factors = (shape + np.arange(k)) / rate
    return np.concatenate([[1.0], np.cumprod(factors)])


class Law(BaseModel, ABC):
    """Base class of every catalog law."""

    model_config = ConfigDict(frozen=True)

    has_density: ClassVar[bool] = True

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n i.i.d. draws; deterministic given the generator state."""
        if n < 1:
            raise ParameterDomainError(f"Sample size must be >= 1, got {n}")
        return self._sample(int(n), rng)

    def density(self, t) -> np.ndarray:
        """Lebesgue density at t, 0 outside the support."""
        if not self.has_density:
            raise NoDensityError(f"{self.kind} has an atom and no density")
        return self._density(_as_array(t))

    def cf(self, t) -> np.ndarray:
        """Characteristic function E[exp(itX)]."""
        return self._cf(_as_array(t))

    @abstractmethod
    def _sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n values."""

    @abstractmethod
    def _density(self, t: np.ndarray) -> np.ndarray:
        """Density on an array."""

    @abstractmethod
    def _cf(self, t: np.ndarray) -> np.ndarray:
        """Characteristic function on an array."""

    @abstractmethod
    def moments(self, k: int) -> np.ndarray:
        """Raw moments mu_0 = 1, mu_1, ..., mu_k."""

    def first_moment(self) -> float:
        """Expectation."""
        return float(self.moments(1)[1])

    def standard_deviation(self) -> float:
        """Standard deviation."""
        mu = self.moments(2)
        return float(np.sqrt(max(mu[2] - mu[1] ** 2, 0.0)))


class Gaussian(Law):
    """Normal law N(mean, sd^2)."""

    kind: Literal["Gaussian"] = "Gaussian"
    mean: float = 0.0
    sd: float = Field(1.0, gt=0)

    def _sample(self, n, rng):
        return rng.normal(self.mean, self.sd, n)

    def _density(self, t):
        return stats.norm.pdf(t, loc=self.mean, scale=self.sd)

    def _cf(self, t):
        return np.exp(1j * self.mean * t - 0.5 * (self.sd * t) ** 2)

    def moments(self, k):
        return _gaussian_moments(self.mean, self.sd, k)


class Laplace(Law):
    """Laplace law with density exp(-|t - location| / scale) / (2 scale)."""

    kind: Literal["Laplace"] = "Laplace"
    location: float = 0.0
    scale: float = Field(1.0, gt=0)

    def _sample(self, n, rng):
        return rng.laplace(self.location, self.scale, n)

    def _density(self, t):
        return stats.laplace.pdf(t, loc=self.location, scale=self.scale)

    def _cf(self, t):
        return np.exp(1j * self.location * t) / (1.0 + (self.scale * t) ** 2)

    def moments(self, k):
        orders = np.arange(k + 1)
        central = np.where(
            orders % 2 == 0, special.factorial(orders) * self.scale**orders, 0.0
        )
        return _shift_moments(central, self.location)


class Beta22(Law):
    """Beta(2, 2) law, density 6 t (1 - t) on (0, 1)."""

    kind: Literal["Beta22"] = "Beta22"

    def _sample(self, n, rng):
        return rng.beta(2.0, 2.0, n)

    def _density(self, t):
        return stats.beta.pdf(t, 2.0, 2.0)

    def _cf(self, t):
        small = np.abs(t) < SMALL_T
        s = 1j * np.where(small, 1.0, t)
        closed = 6.0 * ((np.exp(s) + 1.0) * s - 2.0 * (np.exp(s) - 1.0)) / s**3
        return np.where(small, _series_cf(t, self.moments(SERIES_DEGREE)), closed)

    def moments(self, k):
        factors = (2.0 + np.arange(k)) / (4.0 + np.arange(k))
        return np.concatenate([[1.0], np.cumprod(factors)])


class Uniform(Law):
    """Uniform law on (a, b)."""

    kind: Literal["Uniform"] = "Uniform"
    a: float = 0.0
    b: float = 1.0

    @model_validator(mode="after")
    def check_interval(self):
        if not self.b > self.a:
            raise ValueError(f"Uniform needs a < b, got ({self.a}, {self.b})")
        return self

    def _sample(self, n, rng):
        return rng.uniform(self.a, self.b, n)

    def _density(self, t):
        return stats.uniform.pdf(t, loc=self.a, scale=self.b - self.a)

    def _cf(self, t):
        return _uniform_cf(t, self.a, self.b)

    def moments(self, k):
        return _uniform_moments(self.a, self.b, k)


class DiracUniformMix(Law):
    """Half point mass at -1, half uniform on (-1, 3). Noise only: no density."""

    kind: Literal["DiracUniformMix"] = "DiracUniformMix"

    has_density: ClassVar[bool] = False

    def _sample(self, n, rng):
        atom = rng.random(n) < 0.5
        spread = rng.uniform(-1.0, 3.0, n)
        return np.where(atom, -1.0, spread)

    def _density(self, t):
        raise NoDensityError("DiracUniformMix has an atom at -1")

    def _cf(self, t):
        return 0.5 * np.exp(-1j * t) + 0.5 * _uniform_cf(t, -1.0, 3.0)

    def moments(self, k):
        atom = (-1.0) ** np.arange(k + 1)
        return 0.5 * atom + 0.5 * _uniform_moments(-1.0, 3.0, k)


class Gamma(Law):
    """Gamma law with shape alpha and rate beta."""

    kind: Literal["Gamma"] = "Gamma"
    shape: float = Field(gt=0)
    rate: float = Field(gt=0)

    def _sample(self, n, rng):
        return rng.gamma(self.shape, 1.0 / self.rate, n)

    def _density(self, t):
        return stats.gamma.pdf(t, self.shape, scale=1.0 / self.rate)

    def _cf(self, t):
        return (1.0 - 1j * t / self.rate) ** (-self.shape)

    def moments(self, k):
        return _gamma_moments(self.shape, self.rate, k)


class ShiftedGamma(Law):
    """Gamma(shape, rate) translated by `shift`."""

    kind: Literal["ShiftedGamma"] = "ShiftedGamma"
    shape: float = Field(gt=0)
    rate: float = Field(gt=0)
    shift: float = 0.0

    def _sample(self, n, rng):
        return rng.gamma(self.shape, 1.0 / self.rate, n) + self.shift

    def _density(self, t):
        return stats.gamma.pdf(t - self.shift, self.shape, scale=1.0 / self.rate)

    def _cf(self, t):
        return np.exp(1j * self.shift * t) * (1.0 - 1j * t / self.rate) ** (
            -self.shape
        )

    def moments(self, k):
        return _shift_moments(_gamma_moments(self.shape, self.rate, k), self.shift)


@lru_cache(maxsize=32)
def _bilateral_gamma_table(alpha, beta, gamma_, delta):
    """
    Density of U - V, U ~ Gamma(alpha, beta), V ~ Gamma(gamma_, delta), tabulated
    by a trapezoid convolution on a grid of step BILATERAL_STEP.
    """

    def gamma_table(shape, rate):
        upper = stats.gamma.isf(1e-16, shape, scale=1.0 / rate)
        x = np.arange(int(np.ceil(upper / BILATERAL_STEP)) + 1) * BILATERAL_STEP
        pdf = stats.gamma.pdf(x, shape, scale=1.0 / rate)
        # shape < 1 has an integrable pole at 0; normalization below absorbs it
        pdf[~np.isfinite(pdf)] = 0.0
        last = np.nonzero(pdf >= BILATERAL_PDF_CUTOFF)[0][-1]
        return pdf[: last + 1]

    f_u = gamma_table(alpha, beta)
    f_v = gamma_table(gamma_, delta)
    weights = np.ones_like(f_v)
    weights[[0, -1]] = 0.5

    values = np.convolve(f_u, (weights * f_v)[::-1]) * BILATERAL_STEP
    grid = (np.arange(values.size) - (f_v.size - 1)) * BILATERAL_STEP
    values /= integrate.trapezoid(values, grid)
    return grid, values


class BilateralGamma(Law):
    """Law of U - V with U ~ Gamma(alpha, beta) and V ~ Gamma(gamma, delta)."""

    kind: Literal["BilateralGamma"] = "BilateralGamma"
    alpha: float = Field(gt=0)
    beta: float = Field(gt=0)
    gamma: float = Field(gt=0)
    delta: float = Field(gt=0)

    def _sample(self, n, rng):
        positive = rng.gamma(self.alpha, 1.0 / self.beta, n)
        negative = rng.gamma(self.gamma, 1.0 / self.delta, n)
        return positive - negative

    def _density(self, t):
        grid, values = _bilateral_gamma_table(
            self.alpha, self.beta, self.gamma, self.delta
        )
        return np.interp(t, grid, values, left=0.0, right=0.0)

    def _cf(self, t):
        return (1.0 - 1j * t / self.beta) ** (-self.alpha) * (
            1.0 + 1j * t / self.delta
        ) ** (-self.gamma)

    def moments(self, k):
        m_u = _gamma_moments(self.alpha, self.beta, k)
        m_v = _gamma_moments(self.gamma, self.delta, k)
        moments = np.zeros(k + 1)
        for order in range(k + 1):
            j = np.arange(order + 1)
            moments[order] = np.sum(
                special.comb(order, j)
                * m_u[j]
                * (-1.0) ** (order - j)
                * m_v[order - j]
            )
        return moments


class GaussianMixture(Law):
    """w N(m1, s1^2) + (1 - w) N(m2, s2^2)."""

    kind: Literal["GaussianMixture"] = "GaussianMixture"
    m1: float
    s1: float = Field(gt=0)
    m2: float
    s2: float = Field(gt=0)
    w: float = Field(0.5, ge=0, le=1)

    def _sample(self, n, rng):
        first = rng.random(n) < self.w
        draws_1 = rng.normal(self.m1, self.s1, n)
        draws_2 = rng.normal(self.m2, self.s2, n)
        return np.where(first, draws_1, draws_2)

    def _density(self, t):
        return self.w * stats.norm.pdf(t, self.m1, self.s1) + (
            1.0 - self.w
        ) * stats.norm.pdf(t, self.m2, self.s2)

    def _cf(self, t):
        first = np.exp(1j * self.m1 * t - 0.5 * (self.s1 * t) ** 2)
        second = np.exp(1j * self.m2 * t - 0.5 * (self.s2 * t) ** 2)
        return self.w * first + (1.0 - self.w) * second

    def moments(self, k):
        return self.w * _gaussian_moments(self.m1, self.s1, k) + (
            1.0 - self.w
        ) * _gaussian_moments(self.m2, self.s2, k)
