"""deconvsim: density deconvolution for the repeated measurements model."""

from deconvsim import config

__version__ = "0.1.0"
