"""Empirical bivariate characteristic function of paired observations."""

import logging
import math
import re
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from deconvsim.exceptions import DatasetFormatError, ParameterDomainError
from deconvsim.utils.common import run_parallel

logger = logging.getLogger("deconvsim")

CSV_HEADER = ["y1", "y2"]


def _frozen_vector(value, name: str) -> np.ndarray:
    array = np.array(value, dtype=float)
    if array.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{name} contains non-finite entries")
    array.flags.writeable = False
    return array


class PairedSample(BaseModel):
    """n observations (Y1, Y2) of the repeated measurements model Y = (X, X) + eps."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    y1: np.ndarray
    y2: np.ndarray

    @field_validator("y1", "y2", mode="before")
    @classmethod
    def as_vector(cls, value, info):
        return _frozen_vector(value, info.field_name)

    @model_validator(mode="after")
    def check_lengths(self):
        if self.y1.size != self.y2.size:
            raise ValueError(
                f"y1 and y2 differ in length ({self.y1.size} != {self.y2.size})"
            )
        if self.y1.size < 1:
            raise ValueError("a paired sample needs at least one observation")
        return self

    @property
    def n(self) -> int:
        """Number of observations."""
        return int(self.y1.size)

    def subset(self, indices) -> "PairedSample":
        """Observations at `indices`, in the given order."""
        indices = np.asarray(indices, dtype=int)
        return PairedSample(y1=self.y1[indices], y2=self.y2[indices])

    def coordinate(self, which: int) -> np.ndarray:
        """Y1 for which=1, Y2 for which=2."""
        if which not in (1, 2):
            raise ParameterDomainError(f"coordinate must be 1 or 2, got {which}")
        return self.y1 if which == 1 else self.y2


class EcfTable(BaseModel):
    """Empirical characteristic function tabulated on a rectangular grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid1: np.ndarray
    grid2: np.ndarray
    values: np.ndarray
    marginal1: np.ndarray
    marginal2: np.ndarray


def ecf_at(sample: PairedSample, t1: float, t2: float) -> complex:
    """(1/n) sum_l exp(i t1 y1_l + i t2 y2_l)."""
    phases = np.exp(1j * (t1 * sample.y1 + t2 * sample.y2))
    return complex(np.sum(phases) / sample.n)


def marginal_ecf(sample: PairedSample, t, coordinate: int = 1) -> np.ndarray:
    """phi_n(t, 0) for coordinate 1, phi_n(0, t) for coordinate 2, on an array."""
    y = sample.coordinate(coordinate)
    t = np.asarray(t, dtype=float)
    return np.exp(1j * np.multiply.outer(t, y)).sum(axis=-1) / sample.n


def ecf_table(
    sample: PairedSample, grid, partitions: int = 1, workers: int = 1
) -> EcfTable:
    """
    Tabulates phi_n on the nodes of `grid` (anything exposing nodes1() and
    nodes2(), typically a QuadGrid).

    exp(i t1 y1 + i t2 y2) factorizes, so the table is the product of the
    per-observation phase matrices. Rows of the t1 axis are split into
    `partitions` blocks; each block writes its own rows.
    """
    grid1 = np.asarray(grid.nodes1(), dtype=float)
    grid2 = np.asarray(grid.nodes2(), dtype=float)
    if grid1.size == 0 or grid2.size == 0:
        raise ParameterDomainError("cannot tabulate the ECF on an empty grid")

    phases1 = np.exp(1j * np.multiply.outer(sample.y1, grid1))
    phases2 = np.exp(1j * np.multiply.outer(sample.y2, grid2))

    blocks = np.array_split(np.arange(grid1.size), max(1, min(partitions, grid1.size)))

    def tabulate(rows):
        return phases1[:, rows].T @ phases2 / sample.n

    parts = run_parallel(tabulate, blocks, workers=workers, prefer="threads")
    values = np.vstack(parts)

    logger.debug(
        f"ECF tabulated on {grid1.size}x{grid2.size} nodes for n={sample.n}."
    )
    return EcfTable(
        grid1=grid1,
        grid2=grid2,
        values=values,
        marginal1=phases1.sum(axis=0) / sample.n,
        marginal2=phases2.sum(axis=0) / sample.n,
    )


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        return math.nan


def write_paired_csv(sample: PairedSample, path: Union[str, Path]) -> Path:
    """Writes the sample as CSV with header y1,y2 (round-trip float formatting)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({"y1": sample.y1, "y2": sample.y2})
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def read_paired_csv(path: Union[str, Path]) -> PairedSample:
    """
    Reads a y1,y2 CSV file. Malformed content raises DatasetFormatError
    carrying the 1-based file line number.
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError as e:
        raise DatasetFormatError(f"{path} is empty", line=1) from e
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        line = int(match.group(1)) if match else None
        raise DatasetFormatError(f"{path}: {e}", line=line) from e

    if list(frame.columns) != CSV_HEADER:
        raise DatasetFormatError(
            f"{path}: expected header 'y1,y2', got '{','.join(frame.columns)}'",
            line=1,
        )
    if frame.empty:
        raise DatasetFormatError(f"{path} has no observations", line=2)

    numeric = frame.apply(lambda column: column.map(_parse_float))
    bad = ~np.isfinite(numeric.to_numpy(dtype=float)).all(axis=1)
    if bad.any():
        row = int(np.argmax(bad))
        raise DatasetFormatError(
            f"{path}: non-numeric or non-finite value "
            f"'{frame.iloc[row, 0]},{frame.iloc[row, 1]}'",
            line=row + 2,
        )

    return PairedSample(y1=numeric["y1"].to_numpy(), y2=numeric["y2"].to_numpy())
