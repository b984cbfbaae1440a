"""Configuration package for deconvsim."""

from deconvsim.config.config import activate_dotenv, read_config_file, resolve_mode

__all__ = ["read_config_file", "activate_dotenv", "resolve_mode"]
