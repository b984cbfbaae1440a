"""Utility module for deconvsim logging and file helpers."""

from .logger import create_logger

__all__ = ["create_logger"]
