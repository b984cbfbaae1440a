"""Simulation harness: datasets, loss sweeps, risk studies and rho adaptation."""

from deconvsim.harness.adapt import AdaptReport, data_grid, run_adapt_rho
from deconvsim.harness.risk import RiskReport, run_risk, summarize_losses
from deconvsim.harness.runtime import RunSettings
from deconvsim.harness.simulate import read_sidecar, run_simulation, simulate
from deconvsim.harness.sweep import run_sweep, top_k

__all__ = [
    "AdaptReport",
    "RiskReport",
    "RunSettings",
    "data_grid",
    "read_sidecar",
    "run_adapt_rho",
    "run_risk",
    "run_simulation",
    "run_sweep",
    "simulate",
    "summarize_losses",
    "top_k",
]
