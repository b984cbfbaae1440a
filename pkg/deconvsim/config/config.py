"""Deconvsim central configuration."""

import configparser
import logging
import os
from pathlib import Path

from dotenv import load_dotenv

logger = logging.getLogger("deconvsim")

MODES = ("desk", "repro")


def activate_dotenv(log=logger):
    """Exports DECONVSIM_* overrides from .env.local, or from .env without one."""
    for env_file in (Path.cwd() / ".env.local", Path.cwd() / ".env"):
        if env_file.exists():
            load_dotenv(env_file)
            log.debug(f"Environment overrides from {env_file}")
            return
    log.debug("No .env file, overrides come from the process environment only.")


def read_config_file() -> configparser.ConfigParser:
    """Packaged defaults, then ./config.ini, then DECONVSIM_* variables."""

    config = configparser.ConfigParser()

    defaults = Path(__file__).parent / "config.ini"
    if not defaults.exists():
        raise ValueError(f"Packaged defaults missing: {defaults}")
    config.read(defaults)

    local = Path.cwd() / "config.ini"
    if local.exists():
        logger.debug(f"Overriding defaults with {local}")
        config.read(local)

    _apply_environment_overrides(config)
    return config


def _apply_environment_overrides(config: configparser.ConfigParser):
    """DECONVSIM_SEED and DECONVSIM_WORKERS take precedence over the ini files."""

    for key in ("SEED", "WORKERS"):
        value = os.environ.get(f"DECONVSIM_{key}")
        if value is not None:
            config["Harness"][key] = value


def resolve_mode(settings: configparser.ConfigParser, mode: str) -> tuple:
    """
    Returns (criterion nodes per axis, evaluation grid points) for a run mode.

    "desk" keeps the test suite and small studies fast, "repro" uses the
    8000-node grids of full-scale studies.
    """
    if mode not in MODES:
        raise ValueError(f"Unknown mode '{mode}', expected one of {MODES}")

    prefix = "DESK" if mode == "desk" else "REPRO"
    nodes = settings["Criterion"].getint(f"{prefix}_NODES")
    points = settings["Harness"].getint(f"{prefix}_EVAL_POINTS")
    return nodes, points
