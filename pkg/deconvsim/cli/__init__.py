"""Initialization for the CLI module."""

from .main import adapt_rho, cli, cv, estimate, risk, simulate, summarize, sweep

__all__ = [
    "adapt_rho",
    "cli",
    "cv",
    "estimate",
    "risk",
    "simulate",
    "summarize",
    "sweep",
]
