"""Schema module."""

from deconvsim.schema.schema import RiskSpec, SweepSpec

__all__ = ["RiskSpec", "SweepSpec"]
