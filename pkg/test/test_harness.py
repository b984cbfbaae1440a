"""Simulation harness: datasets, sweeps, risk and rho adaptation"""

import importlib
import math

import numpy as np
import pandas as pd
import pytest

from deconvsim.config import read_config_file
from deconvsim.distributions import catalog_scenario, draw_sample, evaluation_grid
from deconvsim.estimator import EstimatorParams, l2_loss, read_paired_csv
from deconvsim.exceptions import DegenerateParametersError, NumericalFailureError
from deconvsim.harness import (
    RunSettings,
    data_grid,
    read_sidecar,
    run_adapt_rho,
    run_risk,
    run_simulation,
    run_sweep,
    simulate,
    summarize_losses,
    top_k,
)
from deconvsim.schema import RiskSpec, SweepSpec
from deconvsim.utils.common import derive_rng, derive_seed

adapt_module = importlib.import_module("deconvsim.harness.adapt")

QUICK = {"init": "zeros", "max_iters": 10}
PARAMS = EstimatorParams(m=3, nu_est=1.0, h=1.0)


def test_simulation_is_reproducible():
    spec = catalog_scenario("II", n=50, seed=12)
    first, second = simulate(spec), simulate(spec)
    np.testing.assert_array_equal(first.y1, second.y1)
    np.testing.assert_array_equal(first.y2, second.y2)
    reseeded = simulate(spec.model_copy(update={"seed": 13}))
    assert not np.array_equal(first.y1, reseeded.y1)


def test_run_simulation_writes_dataset_and_sidecar(tmp_path):
    spec = catalog_scenario("I", n=30, seed=2)
    path = run_simulation(spec, tmp_path / "data" / "I.csv")
    assert read_sidecar(path) == spec
    np.testing.assert_array_equal(read_paired_csv(path).y1, simulate(spec).y1)
    assert read_sidecar(tmp_path / "missing.csv") is None


def test_sweep_rows_follow_the_cross_product(quick_run):
    spec = SweepSpec(
        scenario={"name": "I", "n": 120, "seed": 5},
        m_list=[2, 3],
        nu_list=[1.0],
        h_list=[0.5, 1.0],
        optimizer=QUICK,
    )
    table = run_sweep(spec, quick_run)
    assert list(table.columns) == ["m", "nu_est", "h", "loss"]
    assert table[["m", "h"]].values.tolist() == [[2, 0.5], [2, 1.0], [3, 0.5], [3, 1.0]]
    assert table["loss"].map(math.isfinite).all()
    assert [c.as_tuple() for c in spec.cells] == list(
        table[["m", "nu_est", "h"]].itertuples(index=False, name=None)
    )


def test_single_cell_sweep_matches_the_pipeline(quick_run):
    spec = SweepSpec(
        scenario={"name": "I", "n": 120, "seed": 5},
        m_list=[3],
        nu_list=[1.0],
        h_list=[1.0],
        optimizer=QUICK,
    )
    table = run_sweep(spec, quick_run)

    optimizer = spec.optimizer.model_copy(update={"seed": derive_seed(5, 0)})
    pipeline = quick_run.pipeline(optimizer, oracle_law=spec.scenario.signal)
    grid = evaluation_grid(spec.scenario, quick_run.eval_points)
    estimate, _ = pipeline.run(simulate(spec.scenario), PARAMS, grid)
    assert table["loss"].iloc[0] == l2_loss(estimate, spec.scenario.signal)


def test_top_k_skips_failed_cells():
    table = pd.DataFrame(
        {
            "m": [1, 2, 3],
            "nu_est": [1.0] * 3,
            "h": [1.0] * 3,
            "loss": [0.3, math.inf, 0.1],
        }
    )
    best = top_k(table, 5)
    assert best["m"].tolist() == [3, 1]


def test_summarize_losses():
    mean, (low, high) = summarize_losses([1.0, 2.0, 3.0])
    assert mean == 2.0
    assert high - mean == pytest.approx(1.96 / math.sqrt(3))
    assert mean - low == pytest.approx(1.96 / math.sqrt(3))
    assert summarize_losses([0.5]) == (0.5, (0.5, 0.5))


def risk_spec(**fields):
    base = {
        "scenario": "I",
        "n": 100,
        "repetitions": 1,
        "param_sets": [[3, 1.0, 1.0]],
        "base_seed": 8,
        "optimizer": QUICK,
    }
    return RiskSpec(**{**base, **fields})


def test_single_repetition_risk_is_its_loss(quick_run):
    spec = risk_spec()
    report = run_risk(spec, quick_run)
    assert report.risk == report.per_repetition[0].loss
    assert report.ci == (report.risk, report.risk)
    assert report.dropped == 0

    scenario = spec.sized_scenario
    sample = draw_sample(scenario, derive_rng(8, 0))
    optimizer = spec.optimizer.model_copy(update={"seed": derive_seed(8, 0)})
    pipeline = quick_run.pipeline(optimizer, oracle_law=scenario.signal)
    estimate, _ = pipeline.run(
        sample, PARAMS, evaluation_grid(scenario, quick_run.eval_points)
    )
    assert report.risk == l2_loss(estimate, scenario.signal)


def test_risk_keeps_the_best_parameter_set(quick_run):
    spec = risk_spec(repetitions=3, param_sets=[[2, 1.0, 0.5], [3, 1.0, 1.0]])
    report = run_risk(spec, quick_run)
    assert report.risk == pytest.approx(np.mean(report.kept_losses))
    assert report.ci[0] <= report.risk <= report.ci[1]
    for repetition in report.per_repetition:
        assert repetition.loss == min(repetition.losses)
        assert repetition.best == spec.param_sets[
            repetition.losses.index(repetition.loss)
        ]


def test_risk_spec_validation():
    with pytest.raises(ValueError):
        risk_spec(param_sets=[])
    with pytest.raises(ValueError):
        risk_spec(param_sets=[[3, 1.0, 1.0]] * 5)
    with pytest.raises(ValueError):
        risk_spec(scenario={"name": "XI"})


@pytest.fixture(scope="module")
def adapt_sample():
    return simulate(catalog_scenario("I", n=150, seed=6))


def test_data_grid(adapt_sample):
    scenario = catalog_scenario("I")
    np.testing.assert_array_equal(
        data_grid(adapt_sample, 11, scenario), np.linspace(-5, 5, 11)
    )
    grid = data_grid(adapt_sample, 11)
    averaged = 0.5 * (adapt_sample.y1 + adapt_sample.y2)
    assert grid[5] == pytest.approx(averaged.mean())


def test_singleton_rho_grid(adapt_sample, quick_run):
    report, selected = run_adapt_rho(
        adapt_sample, [2.0], 1.0, quick_run, np.linspace(-5, 5, 101), params=PARAMS
    )
    assert report.rho_hat == 2.0
    assert report.rows[0].a_n == 0.0
    assert report.branch is None
    assert selected.clipped


def test_shared_parameters_select_the_smallest_rho(adapt_sample, quick_run):
    report, _ = run_adapt_rho(
        adapt_sample,
        [3.0, 1.5, 2.0],
        1.0,
        quick_run,
        np.linspace(-5, 5, 101),
        params=PARAMS,
    )
    assert report.rho_hat == 1.5
    assert [row.rho for row in report.rows] == [1.5, 2.0, 3.0]
    assert all(row.a_n == 0.0 for row in report.rows)


def test_combination_reports_its_branch(adapt_sample, quick_run):
    report, selected = run_adapt_rho(
        adapt_sample,
        [2.0],
        1.0,
        quick_run,
        np.linspace(-5, 5, 101),
        params=PARAMS,
        with_combination=True,
    )
    assert report.branch in ("alt", "main")
    assert selected.clipped


def test_failed_rhos_are_reported(adapt_sample, quick_run, monkeypatch):
    def theoretical_params(n, rho, S, c_h, nu_est=1.0):
        if rho < 2:
            raise DegenerateParametersError(f"m < 1 for rho={rho}")
        return PARAMS

    monkeypatch.setattr(adapt_module, "theoretical_params", theoretical_params)
    report, _ = run_adapt_rho(
        adapt_sample, [1.5, 2.0], 1.0, quick_run, np.linspace(-5, 5, 101)
    )
    assert report.rho_hat == 2.0
    assert report.rows[0].error
    assert report.rows[0].a_n is None


def test_every_rho_failing(adapt_sample, quick_run, monkeypatch):
    def theoretical_params(*args, **kwargs):
        raise DegenerateParametersError("m < 1")

    monkeypatch.setattr(adapt_module, "theoretical_params", theoretical_params)
    with pytest.raises(NumericalFailureError):
        run_adapt_rho(adapt_sample, [1.5, 2.0], 1.0, quick_run, np.linspace(-5, 5, 11))


# four retained parameter sets per comparison scenario
SCENARIO_PARAMS = {
    "CK1": [[15, 1, 2], [13, 1, 2], [14, 1, 2], [11, 1, 2]],
    "CK3": [[14, 3, 2], [13, 2.5, 2], [13, 1.5, 2], [14, 3.5, 2]],
    "CK4": [[13, 4, 2], [15, 3.5, 2], [14, 3.5, 2], [14, 4, 2]],
}


def desk_risk(scenario, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    run = RunSettings.from_config(read_config_file(), mode="desk", workers=8)
    spec = RiskSpec(
        scenario=scenario,
        n=1000,
        repetitions=20,
        param_sets=SCENARIO_PARAMS[scenario],
        optimizer=run.optimizer,
    )
    return run_risk(spec, run)


@pytest.mark.slow
def test_desk_risk_of_gaussian_signal_with_bilateral_gamma_noise(
    tmp_path, monkeypatch
):
    report = desk_risk("CK3", tmp_path, monkeypatch)
    assert 0.02 <= 100 * report.risk <= 0.25


@pytest.mark.slow
@pytest.mark.parametrize("gaussian_scenario", ["CK3", "CK4"])
def test_desk_risk_orders_gaussian_below_gamma_signal(
    gaussian_scenario, tmp_path, monkeypatch
):
    gaussian = desk_risk(gaussian_scenario, tmp_path, monkeypatch)
    gamma = desk_risk("CK1", tmp_path, monkeypatch)
    assert gamma.dropped == 0
    assert gamma.risk >= 3 * gaussian.risk
