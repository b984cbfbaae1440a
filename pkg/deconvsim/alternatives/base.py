"""Base class of alternative density estimators."""

from abc import ABC, abstractmethod


class AlternativeEstimator(ABC):
    """Base class of the estimators the main one can be combined with."""

    @abstractmethod
    def estimate(self, sample, eval_grid):
        """Density estimate of the signal on eval_grid."""
