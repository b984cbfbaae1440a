"""Shared fixtures and the slow-test switch."""

import numpy as np
import pytest

from deconvsim.distributions import catalog_scenario, draw_sample
from deconvsim.estimator import OptimizerConfig, PairedSample
from deconvsim.harness import RunSettings
from deconvsim.utils.common import derive_rng

SMALL_CONFIG = """
[Estimator]
FIT_DEGREE=3
INVERSION_QUAD_POINTS=512

[Criterion]
DESK_NODES=30
PARTITIONS=2

[Optimizer]
MAX_ITERS=20

[Harness]
DESK_EVAL_POINTS=201

[Logging]
LOG_FILE=
"""


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow tests"
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: multi-seed or desk-scale studies")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def single_pair():
    return PairedSample(y1=[1.0], y2=[2.0])


@pytest.fixture(scope="session")
def gaussian_sample():
    """Scenario I (Gaussian signal and noise), 200 observations."""
    return draw_sample(catalog_scenario("I", n=200, seed=7), derive_rng(7, 0))


@pytest.fixture
def quick_optimizer():
    return OptimizerConfig(init="zeros", max_iters=20)


@pytest.fixture
def quick_run(quick_optimizer):
    """Run settings small enough for unit tests."""
    return RunSettings(
        nodes=30,
        eval_points=201,
        quad_points=512,
        partitions=1,
        workers=1,
        fit_degree=3,
        optimizer=quick_optimizer,
    )


@pytest.fixture
def small_config(tmp_path, monkeypatch):
    """Working directory whose config.ini shrinks every grid."""
    (tmp_path / "config.ini").write_text(SMALL_CONFIG, encoding="utf-8")
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("DECONVSIM_SEED", raising=False)
    monkeypatch.delenv("DECONVSIM_WORKERS", raising=False)
    return tmp_path
