"""Near-minimizer search"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from deconvsim.config import read_config_file
from deconvsim.distributions import Gaussian, catalog_scenario, draw_sample
from deconvsim.estimator import (
    OptimizerConfig,
    PolyCF,
    QuadGrid,
    UpsilonBound,
    build_context,
    criterion_value,
    fit_cf,
    fit_cf_over_degrees,
)
from deconvsim.estimator.optimizer import initial_point
from deconvsim.exceptions import NumericalFailureError, UnsupportedInitializationError
from deconvsim.utils.common import derive_rng


@pytest.fixture(scope="module")
def gaussian_ctx():
    spec = catalog_scenario("I", n=200, seed=3)
    sample = draw_sample(spec, derive_rng(3, 0))
    return build_context(sample, QuadGrid.square(1.0, 30), partitions=2)


def test_single_observation_reaches_zero(single_pair):
    ctx = build_context(single_pair, QuadGrid.square(1.0, 10))
    result = fit_cf(ctx, 2, OptimizerConfig(init="zeros"))
    assert result.objective < 1e-12
    assert result.near_minimizer(1)


@pytest.mark.parametrize("method", ["quasi-newton-fd", "nelder-mead"])
@pytest.mark.parametrize("init", ["oracle-projection", "zeros"])
def test_near_minimizer_contract(gaussian_ctx, method, init):
    cfg = OptimizerConfig(method=method, init=init, max_iters=40)
    result = fit_cf(gaussian_ctx, 4, cfg, oracle_law=Gaussian())
    assert not result.failed
    assert result.objective <= result.init_objective
    assert result.near_minimizer(gaussian_ctx.n)
    assert result.objective == pytest.approx(
        criterion_value(gaussian_ctx, result.phi_hat), rel=1e-12
    )


def test_restarts_keep_the_contract(gaussian_ctx):
    cfg = OptimizerConfig(init="zeros", restarts=2, max_iters=20, seed=5)
    result = fit_cf(gaussian_ctx, 3, cfg)
    assert result.objective <= result.init_objective


def test_fits_are_deterministic(gaussian_ctx):
    cfg = OptimizerConfig(init="zeros", restarts=1, max_iters=15, seed=9)
    assert fit_cf(gaussian_ctx, 3, cfg) == fit_cf(gaussian_ctx, 3, cfg)


def test_clamped_fit_stays_in_the_envelope(gaussian_ctx):
    bound = UpsilonBound(rho=1, S=1)
    cfg = OptimizerConfig(init="zeros", clamp=True, upsilon=bound, max_iters=20)
    result = fit_cf(gaussian_ctx, 3, cfg)
    assert np.all(np.abs(result.phi_hat.stored) <= bound.bounds(3) + 1e-15)
    assert result.near_minimizer(gaussian_ctx.n)


def test_given_initialization_is_padded():
    cfg = OptimizerConfig(init=PolyCF.from_stored([0.1, -0.4]))
    np.testing.assert_array_equal(initial_point(4, cfg).stored, [0.1, -0.4, 0, 0])
    np.testing.assert_array_equal(initial_point(1, cfg).stored, [0.1])


def test_oracle_initialization_needs_a_law(gaussian_ctx):
    with pytest.raises(UnsupportedInitializationError):
        fit_cf(gaussian_ctx, 2, OptimizerConfig(init="oracle-projection"))


def test_divergence_carries_the_iterate(gaussian_ctx, monkeypatch):
    monkeypatch.setattr(
        "deconvsim.estimator.optimizer.criterion_value", lambda ctx, p: math.nan
    )
    with pytest.raises(NumericalFailureError) as excinfo:
        fit_cf(gaussian_ctx, 2, OptimizerConfig(init="zeros"))
    np.testing.assert_array_equal(excinfo.value.iterate, [0.0, 0.0])


def test_degree_zero_is_the_constant(gaussian_ctx):
    results = fit_cf_over_degrees(gaussian_ctx, [0], OptimizerConfig(init="zeros"))
    assert results[0].phi_hat == PolyCF.constant(0)
    assert results[0].objective == criterion_value(gaussian_ctx, PolyCF.constant(0))


def test_over_degrees(gaussian_ctx):
    cfg = OptimizerConfig(max_iters=20)
    results = fit_cf_over_degrees(
        gaussian_ctx, [3, 4, 5], cfg, oracle_law=Gaussian(), workers=2
    )
    assert list(results) == [3, 4, 5]
    for m, result in results.items():
        assert result.m == m
        assert result.near_minimizer(gaussian_ctx.n)


def test_over_degrees_flags_failures(gaussian_ctx):
    results = fit_cf_over_degrees(gaussian_ctx, [1, 2], OptimizerConfig())
    assert all(r.failed and r.phi_hat is None for r in results.values())
    assert not results[1].near_minimizer(gaussian_ctx.n)


@pytest.mark.parametrize("degrees", [[], [2, 3, 2]])
def test_over_degrees_validates_input(gaussian_ctx, degrees):
    with pytest.raises(ValueError):
        fit_cf_over_degrees(gaussian_ctx, degrees, OptimizerConfig(init="zeros"))


@pytest.mark.parametrize(
    "fields", [{"max_iters": 0}, {"ftol": 0}, {"restarts": -1}, {"method": "lbfgs"}]
)
def test_config_validation(fields):
    with pytest.raises(ValidationError):
        OptimizerConfig(**fields)


def test_config_from_settings(small_config):
    cfg = OptimizerConfig.from_settings(read_config_file(), seed=4)
    assert cfg.method == "quasi-newton-fd"
    assert cfg.max_iters == 20
    assert cfg.init == "oracle-projection"
    assert cfg.upsilon == UpsilonBound(rho=2, S=10)
    assert cfg.seed == 4


def test_report_holds_fit_and_config(gaussian_ctx):
    cfg = OptimizerConfig(init="zeros", max_iters=5)
    report = fit_cf(gaussian_ctx, 2, cfg).to_report(cfg)
    assert report["fit"]["phi_hat"]["convention"] == "even-real-odd-imag"
    assert report["config"]["init"] == "zeros"


@pytest.mark.slow
def test_single_start_is_close_to_best_of_three_restarts():
    spec = catalog_scenario("I", seed=1)
    sample = draw_sample(spec, derive_rng(1, 0))
    ctx = build_context(sample, QuadGrid.square(2.0, 100), partitions=4)
    single = fit_cf(ctx, 15, OptimizerConfig(), oracle_law=Gaussian())
    restarted = fit_cf(ctx, 15, OptimizerConfig(restarts=2), oracle_law=Gaussian())
    assert single.objective <= single.init_objective
    assert single.objective <= 1.05 * restarted.objective


@pytest.mark.slow
def test_oracle_start_beats_zeros():
    wins = 0
    for seed in range(10):
        spec = catalog_scenario("I", seed=seed)
        sample = draw_sample(spec, derive_rng(seed, 0))
        ctx = build_context(sample, QuadGrid.square(2.0, 60), partitions=2)
        oracle = fit_cf(ctx, 8, OptimizerConfig(), oracle_law=Gaussian())
        zeros = fit_cf(ctx, 8, OptimizerConfig(init="zeros"))
        wins += oracle.objective <= zeros.objective
    assert wins >= 8
