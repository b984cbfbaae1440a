"""Shared helpers: spec files, JSON output, seeded streams and worker pools."""

import json
import logging
from pathlib import Path
from typing import Callable, Iterable, List, Union

import numpy as np
import yaml
from joblib import Parallel, delayed

# logger
logger = logging.getLogger("deconvsim")


def read_yaml_file(file_path) -> dict:
    """Scenario, sweep or risk spec from a .yaml/.yml or .json file."""
    path = Path(file_path)
    if not path.exists():
        raise FileNotFoundError(f"Spec file '{file_path}' not found.")
    if path.suffix not in (".json", ".yaml", ".yml"):
        raise ValueError(f"Spec file '{file_path}' must be .yaml, .yml or .json")

    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f) if path.suffix == ".json" else yaml.safe_load(f)
    if not isinstance(data, dict):
        raise ValueError(f"Spec file '{file_path}' does not hold a mapping")
    return data


def save_json_file(data: dict, file_path: Union[str, Path]):
    """
    Saves the specified data as a JSON file at the specified file path.
    """
    path = Path(file_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, mode="w", encoding="utf-8") as f:
        json.dump(data, f, indent=4)


def derive_rng(base_seed: int, index: int = 0) -> np.random.Generator:
    """
    Independent generator for task `index` of a run seeded with `base_seed`.
    Streams of distinct indices do not overlap.
    """
    return np.random.default_rng(np.random.SeedSequence([int(base_seed), int(index)]))


def run_parallel(
    func: Callable, items: Iterable, workers: int = 1, prefer: str = "processes"
) -> List:
    """
    Maps `func` over `items` on a joblib pool and returns results in input order.
    workers <= 1 runs sequentially in the calling process.
    """
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    logger.debug(f"Dispatching {len(items)} tasks to {workers} workers ({prefer}).")
    return Parallel(n_jobs=workers, prefer=prefer)(
        delayed(func)(item) for item in items
    )


def derive_seed(base_seed: int, index: int = 0) -> int:
    """Integer seed of task `index`, for components that take a plain seed."""
    state = np.random.SeedSequence([int(base_seed), int(index)]).generate_state(1)
    return int(state[0])
