"""Synthetic datasets from catalog scenarios."""

import logging
from pathlib import Path
from typing import Union

from deconvsim.distributions import ScenarioSpec, draw_sample
from deconvsim.estimator import PairedSample, write_paired_csv
from deconvsim.utils.common import derive_rng, save_json_file

logger = logging.getLogger("deconvsim")


def simulate(spec: ScenarioSpec) -> PairedSample:
    """The dataset of a scenario; its seed fixes every draw."""
    return draw_sample(spec, derive_rng(spec.seed, 0))


def sidecar_path(dataset_path: Union[str, Path]) -> Path:
    """JSON file describing the scenario a dataset was drawn from."""
    return Path(dataset_path).with_suffix(".json")


def run_simulation(spec: ScenarioSpec, out: Union[str, Path]) -> Path:
    """Writes the scenario's dataset as CSV next to a JSON copy of the spec."""
    out = Path(out)
    sample = simulate(spec)
    try:
        write_paired_csv(sample, out)
        save_json_file(spec.model_dump(mode="json"), sidecar_path(out))
    except OSError as e:
        raise OSError(f"cannot write dataset to {out}: {e}") from e

    logger.info(f"Scenario {spec.name}: {spec.n} observations written to {out}")
    return out


def read_sidecar(dataset_path: Union[str, Path]):
    """The ScenarioSpec stored next to a dataset, or None."""
    path = sidecar_path(dataset_path)
    if not path.is_file():
        return None
    return ScenarioSpec.model_validate_json(path.read_text(encoding="utf-8"))
