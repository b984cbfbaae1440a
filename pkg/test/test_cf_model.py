"""Polynomial characteristic functions"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from deconvsim.distributions import Beta22, Gamma, Gaussian, Laplace
from deconvsim.estimator import (
    PolyCF,
    UpsilonBound,
    clamp_to_upsilon,
    evaluate,
    fit_degree,
    project_cf,
    truncate,
)
from deconvsim.exceptions import (
    ModelClassError,
    ParameterDomainError,
    UnsupportedInitializationError,
)

coefficients = st.lists(
    st.floats(min_value=-5, max_value=5, allow_nan=False), min_size=0, max_size=15
)
abscissae = st.floats(min_value=-3, max_value=3, allow_nan=False)


def gaussian_taylor(degree):
    series = np.zeros(degree + 1, dtype=complex)
    for j in range(degree // 2 + 1):
        series[2 * j] = (-1) ** j / (2**j * math.factorial(j))
    return series


def test_constant_polynomial():
    p = PolyCF.constant(4)
    assert evaluate(p, 1.7) == 1.0 + 0j
    np.testing.assert_array_equal(evaluate(p, np.linspace(-2, 2, 5)), np.ones(5))


def test_hand_evaluation():
    p = PolyCF.from_stored([1.0, -0.5])
    assert evaluate(p, 2.0) == pytest.approx(-1.0 + 2.0j, abs=1e-15)
    assert p(2.0) == evaluate(p, 2.0)


@settings(max_examples=100, deadline=None)
@given(coefficients)
def test_origin_is_exactly_one(stored):
    assert evaluate(PolyCF.from_stored(stored), 0.0) == 1.0 + 0j


@settings(max_examples=100, deadline=None)
@given(coefficients, abscissae)
def test_hermitian_symmetry(stored, t):
    p = PolyCF.from_stored(stored)
    assert evaluate(p, -t) == pytest.approx(evaluate(p, t).conjugate(), abs=1e-12)


def test_complex_coefficients_follow_the_convention():
    p = PolyCF.from_stored([0.3, -0.5, 0.2])
    np.testing.assert_array_equal(
        p.complex_coefficients(), [1.0, 0.3j, -0.5 + 0j, 0.2j]
    )


def test_conjugate_negates_odd_slots(rng):
    p = PolyCF.from_stored(rng.normal(size=6))
    t = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(evaluate(p.conjugate(), t), np.conj(evaluate(p, t)))


def test_coefficient_count_must_match_degree():
    with pytest.raises(ValidationError):
        PolyCF(m=3, coeffs=[1.0, 2.0])
    with pytest.raises(ValidationError):
        PolyCF.from_stored([1.0, math.nan])


def test_json_carries_the_convention():
    p = PolyCF.from_stored([0.5, -0.25])
    data = p.model_dump(mode="json")
    assert data == {"convention": "even-real-odd-imag", "m": 2, "coeffs": [0.5, -0.25]}
    assert PolyCF.model_validate(data) == p


def test_truncate_keeps_low_degrees():
    p = PolyCF.from_stored([0.1, -0.2, 0.3])
    assert truncate(p, 5) == p
    assert truncate(p, 2) == PolyCF.from_stored([0.1, -0.2])
    assert truncate(p, 0) == PolyCF.constant(0)


def test_truncate_gaussian_series():
    p = truncate(gaussian_taylor(8), 4)
    assert p.m == 4
    np.testing.assert_allclose(p.stored[1::2], [-0.5, 0.125])
    np.testing.assert_array_equal(p.stored[0::2], [0.0, 0.0])


@pytest.mark.parametrize(
    "series",
    [[2.0, 0.0], [1.0, 0.5 + 0j], [1.0, 0.0, 0.25j]],
)
def test_truncate_rejects_non_candidates(series):
    with pytest.raises(ModelClassError):
        truncate(series, 2)


def test_truncate_rejects_negative_degree():
    with pytest.raises(ParameterDomainError):
        truncate(PolyCF.constant(2), -1)


@settings(max_examples=50, deadline=None)
@given(coefficients, st.integers(min_value=0, max_value=20))
def test_truncate_is_idempotent(stored, m):
    once = truncate(PolyCF.from_stored(stored), m)
    assert truncate(once, m) == once


@pytest.mark.parametrize(
    "law, m, expected",
    [
        (Gaussian(), 2, [0.0, -0.5]),
        (Beta22(), 1, [0.5]),
        (Laplace(), 0, []),
        (Gaussian(), 4, [0.0, -0.5, 0.0, 0.125]),
    ],
)
def test_project_cf(law, m, expected):
    np.testing.assert_allclose(project_cf(law, m).stored, expected, atol=1e-15)


def test_projection_approximates_the_cf():
    law = Gamma(shape=4, rate=2)
    t = np.linspace(-0.25, 0.25, 11)
    np.testing.assert_allclose(evaluate(project_cf(law, 12), t), law.cf(t), atol=1e-6)


def test_projection_needs_moments():
    with pytest.raises(UnsupportedInitializationError):
        project_cf(object(), 3)


def test_upsilon_bounds():
    bound = UpsilonBound(rho=2, S=2)
    np.testing.assert_allclose(bound.bounds(2), [2.0, 2.0])
    with pytest.raises(ValidationError):
        UpsilonBound(rho=0.5, S=1)


@pytest.mark.parametrize(
    "stored, rho, S, expected",
    [
        ([10.0], 1, 1, [1.0]),
        ([0.0, -5.0], 2, 2, [0.0, -2.0]),
        ([-10.0], 1, 1, [-1.0]),
    ],
)
def test_clamp_examples(stored, rho, S, expected):
    clamped = clamp_to_upsilon(PolyCF.from_stored(stored), UpsilonBound(rho=rho, S=S))
    np.testing.assert_allclose(clamped.stored, expected)


def test_clamp_keeps_admissible_polynomials():
    p = PolyCF.from_stored([0.1, -0.1])
    assert clamp_to_upsilon(p, UpsilonBound(rho=2, S=10)) is p


@settings(max_examples=100, deadline=None)
@given(
    coefficients,
    st.floats(min_value=1, max_value=5),
    st.floats(min_value=0.1, max_value=10),
)
def test_clamp_is_idempotent_and_shrinks(stored, rho, S):
    p = PolyCF.from_stored(stored)
    bound = UpsilonBound(rho=rho, S=S)
    once = clamp_to_upsilon(p, bound)
    assert clamp_to_upsilon(once, bound) == once
    assert np.all(np.abs(once.stored) <= np.abs(p.stored))
    assert np.all(np.sign(once.stored) == np.sign(p.stored))


def test_fit_degree():
    assert fit_degree(1000, 2) == 15
    with pytest.raises(ParameterDomainError):
        fit_degree(10, 2)
