"""k-nearest-neighbour classifier with fully specified tie-breaking."""
from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch, InsufficientData, ModelNotTrained
from ..genres import NUM_GENRES


class KnnClassifier:
    """Vote-fraction classifier over the k nearest training rows.

    Distance ties are broken by the lower training-row index (stable sort).
    When the top vote count ties across classes, the predicted class is the
    class of the nearest neighbour among the tied classes; the probability
    distribution still reports the raw vote fractions.
    """

    def __init__(self, k: int = 5):
        self.k = k
        self.train_x: np.ndarray | None = None
        self.train_y: np.ndarray | None = None

    def fit(self, x: np.ndarray, y: np.ndarray) -> "KnnClassifier":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if x.ndim != 2 or x.shape[0] < 2 or x.shape[0] != y.size:
            raise InsufficientData("knn needs >= 2 rows with matching labels")
        self.train_x = x
        self.train_y = y
        return self

    def _neighbours(self, x: np.ndarray) -> np.ndarray:
        if self.train_x is None:
            raise ModelNotTrained("knn was never fitted")
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.train_x.shape[1],):
            raise DimensionMismatch(
                f"query must have {self.train_x.shape[1]} entries"
            )
        distances = np.sqrt(((self.train_x - x) ** 2).sum(axis=1))
        order = np.argsort(distances, kind="stable")
        return order[: min(self.k, order.size)]

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        neighbours = self._neighbours(x)
        probs = np.zeros(NUM_GENRES)
        for idx in neighbours:
            probs[self.train_y[idx]] += 1.0
        return probs / neighbours.size

    def predict(self, x: np.ndarray) -> int:
        neighbours = self._neighbours(x)
        votes = np.zeros(NUM_GENRES, dtype=np.int64)
        for idx in neighbours:
            votes[self.train_y[idx]] += 1
        top = votes.max()
        tied = np.flatnonzero(votes == top)
        if tied.size == 1:
            return int(tied[0])
        # nearest neighbour whose class is among the tied classes wins
        tied_set = set(int(c) for c in tied)
        for idx in neighbours:
            if int(self.train_y[idx]) in tied_set:
                return int(self.train_y[idx])
        return int(tied[0])  # unreachable: tied classes all hold votes

    def to_dict(self) -> dict:
        if self.train_x is None:
            raise ModelNotTrained("knn was never fitted")
        return {
            "k": self.k,
            "train_x": self.train_x.tolist(),
            "train_y": self.train_y.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "KnnClassifier":
        model = cls(k=int(doc["k"]))
        model.train_x = np.array(doc["train_x"], dtype=np.float64)
        model.train_y = np.array(doc["train_y"], dtype=np.int64)
        return model
