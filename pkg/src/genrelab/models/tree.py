"""CART decision tree with Gini impurity and exact tie-breaking rules.

Candidate thresholds are the midpoints between consecutive distinct sorted
values in each column. The best split maximizes Gini gain; ties go to the
lowest column index, then the lowest threshold. Growth stops at depth 12,
at nodes smaller than 2 rows, at pure nodes, and when no split has
strictly positive gain. Leaves store class-frequency distributions.
"""
from __future__ import annotations

import numpy as np

from ..errors import DegenerateLabels, DimensionMismatch, InsufficientData, ModelNotTrained
from ..genres import NUM_GENRES

MAX_DEPTH = 12


def gini_impurity(counts: np.ndarray) -> float:
    """1 - sum of squared class proportions; 0 for a pure node."""
    total = counts.sum()
    if total == 0:
        return 0.0
    proportions = counts / total
    return float(1.0 - (proportions ** 2).sum())


def _best_split_in_column(values, onehot, parent_gini):
    """Best (gain, threshold) over one column, lowest threshold on ties."""
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    boundaries = np.flatnonzero(sorted_values[1:] > sorted_values[:-1])
    if boundaries.size == 0:
        return None

    prefix = np.cumsum(onehot[order], axis=0)
    total = prefix[-1]
    n = values.size

    left_counts = prefix[boundaries]
    right_counts = total - left_counts
    n_left = (boundaries + 1).astype(np.float64)
    n_right = n - n_left

    gini_left = 1.0 - ((left_counts / n_left[:, None]) ** 2).sum(axis=1)
    gini_right = 1.0 - ((right_counts / n_right[:, None]) ** 2).sum(axis=1)
    gains = parent_gini - (n_left * gini_left + n_right * gini_right) / n

    best = int(np.argmax(gains))  # first max = lowest threshold
    threshold = 0.5 * (sorted_values[boundaries[best]] + sorted_values[boundaries[best] + 1])
    return float(gains[best]), float(threshold)


class DecisionTree:
    """Gini-impurity CART classifier.

    ``max_features`` (used by the forest) samples that many candidate
    columns per split from ``rng``; with the default None every column is
    a candidate and growth is fully deterministic.
    """

    def __init__(self, max_depth: int = MAX_DEPTH, max_features: int | None = None):
        self.max_depth = max_depth
        self.max_features = max_features
        self.root: dict | None = None
        self.num_columns: int | None = None

    def fit(self, x: np.ndarray, y: np.ndarray,
            rng: np.random.Generator | None = None) -> "DecisionTree":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if y.size == 0:
            raise DegenerateLabels("empty label vector")
        if x.ndim != 2 or x.shape[0] < 2 or x.shape[0] != y.size:
            raise InsufficientData("tree needs >= 2 rows with matching labels")
        if self.max_features is not None and rng is None:
            rng = np.random.default_rng(0)
        self.num_columns = x.shape[1]
        onehot = np.zeros((y.size, NUM_GENRES))
        onehot[np.arange(y.size), y] = 1.0
        self.root = self._grow(x, y, onehot, depth=0, rng=rng)
        return self

    def _leaf(self, y: np.ndarray) -> dict:
        counts = np.bincount(y, minlength=NUM_GENRES).astype(np.float64)
        return {"probs": (counts / y.size).tolist()}

    def _grow(self, x, y, onehot, depth, rng) -> dict:
        counts = np.bincount(y, minlength=NUM_GENRES)
        if depth >= self.max_depth or y.size < 2:
            return self._leaf(y)
        parent_gini = gini_impurity(counts)
        if parent_gini == 0.0:
            return self._leaf(y)

        if self.max_features is not None and self.max_features < x.shape[1]:
            columns = np.sort(rng.choice(x.shape[1], size=self.max_features, replace=False))
        else:
            columns = np.arange(x.shape[1])

        best_gain = 0.0
        best_column = None
        best_threshold = None
        for column in columns:  # ascending: ties keep the lowest column
            found = _best_split_in_column(x[:, column], onehot, parent_gini)
            if found is None:
                continue
            gain, threshold = found
            if gain > best_gain:
                best_gain, best_column, best_threshold = gain, int(column), threshold

        if best_column is None:
            return self._leaf(y)

        left_mask = x[:, best_column] <= best_threshold
        return {
            "column": best_column,
            "threshold": best_threshold,
            "left": self._grow(x[left_mask], y[left_mask], onehot[left_mask], depth + 1, rng),
            "right": self._grow(x[~left_mask], y[~left_mask], onehot[~left_mask], depth + 1, rng),
        }

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        if self.root is None:
            raise ModelNotTrained("tree was never fitted")
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.num_columns,):
            raise DimensionMismatch(f"query must have {self.num_columns} entries")
        node = self.root
        while "probs" not in node:
            node = node["left"] if x[node["column"]] <= node["threshold"] else node["right"]
        return np.array(node["probs"])

    def predict(self, x: np.ndarray) -> int:
        return int(np.argmax(self.predict_proba(x)))

    def to_dict(self) -> dict:
        if self.root is None:
            raise ModelNotTrained("tree was never fitted")
        return {
            "max_depth": self.max_depth,
            "max_features": self.max_features,
            "num_columns": self.num_columns,
            "root": self.root,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DecisionTree":
        tree = cls(max_depth=int(doc["max_depth"]),
                   max_features=doc.get("max_features"))
        tree.num_columns = int(doc["num_columns"])
        tree.root = doc["root"]
        return tree
