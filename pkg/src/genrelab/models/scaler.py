"""Per-column standardization shared by all five models."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientData

STD_FLOOR = 1e-12


@dataclass(frozen=True)
class Scaler:
    """Column means and population stds; stds floored at 1e-12."""

    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "means", np.asarray(self.means, dtype=np.float64))
        object.__setattr__(self, "stds", np.asarray(self.stds, dtype=np.float64))
        if self.means.shape != self.stds.shape or self.means.ndim != 1:
            raise ValueError("means and stds must be 1-D arrays of equal length")
        if np.any(self.stds < STD_FLOOR):
            raise ValueError(f"stds must be floored at {STD_FLOOR}")

    def apply(self, x: np.ndarray) -> np.ndarray:
        """z = (x - mean) / std, per column; accepts one row or a matrix."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.means.size:
            raise ValueError(
                f"expected {self.means.size} columns, got {x.shape[-1]}"
            )
        return (x - self.means) / self.stds

    def to_dict(self) -> dict:
        return {"means": self.means.tolist(), "stds": self.stds.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "Scaler":
        return cls(means=np.array(doc["means"]), stds=np.array(doc["stds"]))


def fit_scaler(rows: np.ndarray) -> Scaler:
    """Fit column means and population stds over a (n, d) matrix, n >= 2."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise InsufficientData("scaler fitting needs at least 2 rows")
    means = rows.mean(axis=0)
    stds = np.maximum(rows.std(axis=0), STD_FLOOR)
    return Scaler(means=means, stds=stds)
