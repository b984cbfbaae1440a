"""Alternative estimators module."""

from deconvsim.alternatives.base import AlternativeEstimator
from deconvsim.alternatives.kernel import KernelBaseline
from deconvsim.alternatives.manager import get_alternative

__all__ = ["AlternativeEstimator", "KernelBaseline", "get_alternative"]
