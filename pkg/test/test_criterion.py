"""Contrast criterion M_n"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from deconvsim.distributions import Gaussian
from deconvsim.estimator import (
    PairedSample,
    PolyCF,
    QuadGrid,
    build_context,
    criterion_gradient,
    criterion_value,
    evaluate,
    project_cf,
    truncate,
)
from deconvsim.exceptions import ParameterDomainError


def naive_criterion(sample, grid, p):
    """Direct double loop over the grid nodes."""
    total = 0.0
    for t1 in grid.nodes1():
        for t2 in grid.nodes2():
            joint = np.mean(np.exp(1j * (t1 * sample.y1 + t2 * sample.y2)))
            first = np.mean(np.exp(1j * t1 * sample.y1))
            second = np.mean(np.exp(1j * t2 * sample.y2))
            residual = evaluate(p, t1 + t2) * first * second - joint * evaluate(
                p, t1
            ) * evaluate(p, t2)
            total += abs(residual) ** 2
    return total * grid.cell_weight


def test_midpoint_nodes():
    grid = QuadGrid(nu=1.0, k1=4, k2=2)
    np.testing.assert_allclose(grid.nodes1(), [-0.75, -0.25, 0.25, 0.75])
    np.testing.assert_allclose(grid.nodes2(), [-0.5, 0.5])
    assert grid.cell_weight == pytest.approx(0.5 * 1.0)


@pytest.mark.parametrize(
    "fields", [{"nu": 0, "k1": 4, "k2": 4}, {"nu": 1, "k1": 1, "k2": 4}]
)
def test_grid_validation(fields):
    with pytest.raises(ValidationError):
        QuadGrid(**fields)


def test_sum_cache_is_built_for_square_grids(single_pair):
    ctx = build_context(single_pair, QuadGrid.square(1.0, 6))
    assert ctx.sumgrid.size == 11
    t1, t2 = ctx.table.grid1, ctx.table.grid2
    np.testing.assert_allclose(
        ctx.sumgrid[ctx.sum_index], np.add.outer(t1, t2), rtol=0, atol=1e-12
    )
    assert build_context(single_pair, QuadGrid(nu=1.0, k1=6, k2=5)).sumgrid is None


def test_partitions_must_be_positive(single_pair):
    with pytest.raises(ParameterDomainError):
        build_context(single_pair, QuadGrid.square(1.0, 4), partitions=0)


@settings(max_examples=50, deadline=None)
@given(
    st.floats(min_value=-10, max_value=10, allow_nan=False),
    st.floats(min_value=-10, max_value=10, allow_nan=False),
    st.floats(min_value=0.1, max_value=5),
    st.integers(min_value=2, max_value=30),
)
def test_single_observation_zero_law(y1, y2, nu, nodes):
    ctx = build_context(PairedSample(y1=[y1], y2=[y2]), QuadGrid.square(nu, nodes))
    assert criterion_value(ctx, PolyCF.constant(3)) < 1e-12


def test_matches_double_loop_on_square_grid(rng):
    sample = PairedSample(y1=rng.normal(size=7), y2=rng.normal(size=7))
    grid = QuadGrid.square(1.5, 9)
    p = PolyCF.from_stored(rng.normal(scale=0.3, size=3))
    value = criterion_value(build_context(sample, grid, partitions=2), p)
    assert value == pytest.approx(naive_criterion(sample, grid, p), rel=1e-10)


def test_matches_double_loop_on_rectangular_grid(rng):
    sample = PairedSample(y1=rng.normal(size=5), y2=rng.normal(size=5))
    grid = QuadGrid(nu=2.0, k1=7, k2=4)
    p = PolyCF.from_stored(rng.normal(scale=0.3, size=4))
    value = criterion_value(build_context(sample, grid), p)
    assert value == pytest.approx(naive_criterion(sample, grid, p), rel=1e-10)


def test_sum_cache_matches_per_pair_evaluation(gaussian_sample, rng):
    ctx = build_context(gaussian_sample, QuadGrid.square(2.0, 40), partitions=3)
    p = PolyCF.from_stored(rng.normal(scale=0.2, size=6))
    cached = criterion_value(ctx, p)
    direct = criterion_value(ctx, p, use_sum_cache=False)
    assert cached == pytest.approx(direct, rel=1e-12)


def test_fixed_partitions_are_bit_stable(gaussian_sample):
    p = project_cf(Gaussian(), 6)
    grid = QuadGrid.square(1.0, 40)
    first = criterion_value(build_context(gaussian_sample, grid, partitions=4), p)
    second = criterion_value(
        build_context(gaussian_sample, grid, partitions=4, workers=2), p
    )
    assert first == second
    single = criterion_value(build_context(gaussian_sample, grid, partitions=1), p)
    assert first == pytest.approx(single, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(min_value=-2, max_value=2), min_size=1, max_size=6),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_criterion_is_nonnegative(stored, seed):
    rng = np.random.default_rng(seed)
    sample = PairedSample(y1=rng.normal(size=8), y2=rng.normal(size=8))
    ctx = build_context(sample, QuadGrid.square(1.0, 8))
    assert criterion_value(ctx, PolyCF.from_stored(stored)) >= 0.0


def test_invariant_under_sample_reflection(gaussian_sample, rng):
    grid = QuadGrid.square(1.5, 30)
    reflected = PairedSample(y1=-gaussian_sample.y1, y2=-gaussian_sample.y2)
    p = PolyCF.from_stored(rng.normal(scale=0.3, size=5))
    original = criterion_value(build_context(gaussian_sample, grid), p)
    mirrored = criterion_value(build_context(reflected, grid), p.conjugate())
    assert mirrored == pytest.approx(original, rel=1e-10)


def test_grid_refinement_is_stable(gaussian_sample):
    sample = gaussian_sample.subset(np.arange(100))
    p = project_cf(Gaussian(sd=np.sqrt(2.0)), 4)
    coarse = criterion_value(build_context(sample, QuadGrid.square(1.0, 100)), p)
    fine = criterion_value(build_context(sample, QuadGrid.square(1.0, 200)), p)
    assert abs(fine - coarse) < 0.02 * fine


@pytest.fixture(scope="module")
def noiseless_ctx():
    x = Gaussian().sample(5000, np.random.default_rng(17))
    sample = PairedSample(y1=x, y2=x)
    return build_context(sample, QuadGrid.square(1.0, 200), partitions=4)


@pytest.mark.parametrize("m", [10, 12])
def test_vanishes_near_the_truth_without_noise(noiseless_ctx, m):
    p = truncate(project_cf(Gaussian(), 16), m)
    assert p.m == m
    assert criterion_value(noiseless_ctx, p) < 1e-3


def test_gradient_vanishes_at_global_minimum(single_pair):
    ctx = build_context(single_pair, QuadGrid.square(1.0, 10))
    gradient = criterion_gradient(ctx, PolyCF.constant(4))
    assert np.linalg.norm(gradient) < 1e-6


def test_gradient_matches_forward_differences(gaussian_sample, rng):
    ctx = build_context(gaussian_sample, QuadGrid.square(1.0, 30))
    p = PolyCF.from_stored(rng.normal(scale=0.5, size=2))
    value = criterion_value(ctx, p)
    forward = np.zeros(2)
    for k in range(2):
        step = 1e-7 * max(1.0, abs(p.stored[k]))
        shifted = p.stored.copy()
        shifted[k] += step
        forward[k] = (criterion_value(ctx, PolyCF.from_stored(shifted)) - value) / step
    np.testing.assert_allclose(
        criterion_gradient(ctx, p), forward, rtol=1e-4, atol=1e-8 * (1 + value)
    )


def test_gradient_needs_positive_step(single_pair):
    ctx = build_context(single_pair, QuadGrid.square(1.0, 4))
    with pytest.raises(ParameterDomainError):
        criterion_gradient(ctx, PolyCF.constant(1), h_fd=0)
