"""
Candidate characteristic functions: complex polynomials 1 + sum_k c_k t^k with
c_k real for even k and purely imaginary for odd k, which makes every candidate
Hermitian (phi(-t) = conj(phi(t))) and pins phi(0) = 1.

Only the m real numbers behind c_1..c_m are stored: c_k itself for even k, the
imaginary part of c_k for odd k.
"""

import math
from typing import Literal, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from deconvsim.exceptions import (
    ModelClassError,
    ParameterDomainError,
    UnsupportedInitializationError,
)

CONVENTION = "even-real-odd-imag"

# tolerance on the structure of an externally supplied coefficient series
SERIES_TOL = 1e-12


class PolyCF(BaseModel):
    """Polynomial candidate characteristic function of degree m."""

    model_config = ConfigDict(frozen=True)

    convention: Literal["even-real-odd-imag"] = CONVENTION
    m: int = Field(ge=0)
    coeffs: Tuple[float, ...] = ()

    @field_validator("coeffs", mode="before")
    @classmethod
    def as_floats(cls, value):
        return tuple(float(c) for c in np.asarray(value, dtype=float).ravel())

    @model_validator(mode="after")
    def check_length(self):
        if len(self.coeffs) != self.m:
            raise ValueError(
                f"degree {self.m} needs {self.m} stored coefficients, "
                f"got {len(self.coeffs)}"
            )
        if not all(math.isfinite(c) for c in self.coeffs):
            raise ValueError("coefficients must be finite")
        return self

    @classmethod
    def constant(cls, m: int = 0) -> "PolyCF":
        """The constant 1, written with m zero coefficients."""
        return cls(m=m, coeffs=np.zeros(m))

    @classmethod
    def from_stored(cls, stored: Sequence[float]) -> "PolyCF":
        stored = np.asarray(stored, dtype=float)
        return cls(m=stored.size, coeffs=stored)

    @property
    def stored(self) -> np.ndarray:
        """The m free real parameters, degree 1 first."""
        return np.asarray(self.coeffs, dtype=float)

    def complex_coefficients(self) -> np.ndarray:
        """c_0 = 1, c_1, ..., c_m as complex numbers."""
        stored = self.stored
        degrees = np.arange(1, self.m + 1)
        values = np.where(degrees % 2 == 0, stored + 0j, 1j * stored)
        return np.concatenate([[1.0 + 0j], values])

    def conjugate(self) -> "PolyCF":
        """Coefficients of t -> conj(phi(t)), i.e. odd slots negated."""
        signs = np.where(np.arange(1, self.m + 1) % 2 == 1, -1.0, 1.0)
        return PolyCF.from_stored(signs * self.stored)

    def __call__(self, t):
        return evaluate(self, t)


class UpsilonBound(BaseModel):
    """Coefficient envelope |c_j| <= S^j / j^(j / rho)."""

    model_config = ConfigDict(frozen=True)

    rho: float = Field(ge=1)
    S: float = Field(gt=0)

    def bounds(self, m: int) -> np.ndarray:
        """Admissible magnitudes for degrees 1..m."""
        j = np.arange(1, m + 1, dtype=float)
        return np.exp(j * math.log(self.S) - (j / self.rho) * np.log(j))


def evaluate(p: PolyCF, t) -> Union[complex, np.ndarray]:
    """
    1 + sum_k c_k t^k. The even part is a polynomial in t^2 and the odd part is
    t times a polynomial in t^2, so phi(-t) is the exact conjugate of phi(t).
    """
    t_arr = np.asarray(t, dtype=float)
    stored = p.stored
    u = t_arr * t_arr
    even = np.concatenate([[1.0], stored[1::2]])
    odd = stored[0::2]
    real = polynomial.polyval(u, even)
    imag = t_arr * polynomial.polyval(u, odd) if odd.size else np.zeros_like(t_arr)
    values = real + 1j * imag
    return complex(values) if values.ndim == 0 else values


def truncate(series: Union[PolyCF, Sequence[complex]], m: int) -> PolyCF:
    """
    Keeps the terms of degree <= m. `series` is a PolyCF or the complex
    coefficients c_0, c_1, ... of a candidate characteristic function.
    """
    if m < 0:
        raise ParameterDomainError(f"truncation degree must be >= 0, got {m}")
    if isinstance(series, PolyCF):
        return PolyCF.from_stored(series.stored[:m])

    coefficients = np.asarray(series, dtype=complex)
    if coefficients.size == 0 or abs(coefficients[0] - 1.0) > SERIES_TOL:
        raise ModelClassError("constant term of a characteristic function must be 1")

    kept = coefficients[1 : m + 1]
    degrees = np.arange(1, kept.size + 1)
    even = degrees % 2 == 0
    if np.any(np.abs(kept.imag[even]) > SERIES_TOL) or np.any(
        np.abs(kept.real[~even]) > SERIES_TOL
    ):
        raise ModelClassError(
            "coefficients must be real for even degrees and imaginary for odd ones"
        )
    return PolyCF.from_stored(np.where(even, kept.real, kept.imag))


def project_cf(law, m: int) -> PolyCF:
    """
    Degree-m Taylor polynomial at 0 of the characteristic function of `law`,
    c_k = mu_k i^k / k!, built from the law's closed-form moments.
    """
    moments = getattr(law, "moments", None)
    if moments is None:
        raise UnsupportedInitializationError(
            f"{type(law).__name__} does not provide its moments"
        )
    try:
        mu = np.asarray(moments(m), dtype=float)
    except NotImplementedError as e:
        raise UnsupportedInitializationError(str(e)) from e

    degrees = np.arange(m + 1)
    # i^k = (-1)^(k/2) for even k, i (-1)^((k-1)/2) for odd k
    signs = np.where((degrees // 2) % 2 == 0, 1.0, -1.0)
    factorials = np.array([math.factorial(k) for k in degrees], dtype=float)
    stored = (signs * mu / factorials)[1:]
    return PolyCF.from_stored(stored)


def clamp_to_upsilon(p: PolyCF, bound: UpsilonBound) -> PolyCF:
    """Clips every coefficient magnitude to the envelope, keeping its sign."""
    limits = bound.bounds(p.m)
    clipped = np.clip(p.stored, -limits, limits)
    if np.array_equal(clipped, p.stored):
        return p
    return PolyCF.from_stored(clipped)


def fit_degree(n: int, rho0: float) -> int:
    """Degree ceil(2 rho0 ln n / ln ln n) of the fitted characteristic function."""
    if n < 16:
        raise ParameterDomainError(f"n must be >= 16 for ln ln n > 0, got {n}")
    return math.ceil(2.0 * rho0 * math.log(n) / math.log(math.log(n)))
