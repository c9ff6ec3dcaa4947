"""The trained artifact: five models plus shared preprocessing."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientData
from ..features import FEATURE_LAYOUT_ID
from ..genres import GENRES, genre_name
from .forest import RandomForest
from .knn import KnnClassifier
from .mlp import MlpClassifier
from .naive_bayes import GaussianNaiveBayes
from .scaler import Scaler, fit_scaler
from .tree import DecisionTree

SCHEMA_VERSION = 1
MODEL_NAMES = ("knn", "gnb", "tree", "forest", "mlp")


@dataclass
class ModelBundle:
    """Scaler + the five trained models, versioned for persistence."""

    scaler: Scaler
    knn: KnnClassifier
    gnb: GaussianNaiveBayes
    tree: DecisionTree
    forest: RandomForest
    mlp: MlpClassifier
    train_seed: int
    genres: tuple[str, ...] = GENRES
    feature_layout: str = FEATURE_LAYOUT_ID
    schema_version: int = SCHEMA_VERSION

    def models(self) -> dict:
        return {
            "knn": self.knn,
            "gnb": self.gnb,
            "tree": self.tree,
            "forest": self.forest,
            "mlp": self.mlp,
        }

    def predict_proba_all(self, features: np.ndarray) -> dict[str, np.ndarray]:
        """Per-model genre distributions for one raw 57-value vector."""
        z = self.scaler.apply(np.asarray(features, dtype=np.float64))
        return {name: model.predict_proba(z) for name, model in self.models().items()}


def train_all(rows: np.ndarray, labels: np.ndarray, seed: int) -> ModelBundle:
    """Fit the scaler and all five models on labeled feature vectors.

    Every genre present in ``labels`` needs at least 2 examples. The two
    stochastic models get seeds derived from ``seed`` (forest: seed,
    mlp: seed + 1); the rest are deterministic by construction.
    """
    rows = np.asarray(rows, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if rows.ndim != 2 or rows.shape[0] != labels.size or rows.shape[0] == 0:
        raise InsufficientData("training needs >= 2 labeled rows")
    for code in np.unique(labels):
        count = int((labels == code).sum())
        if count < 2:
            raise InsufficientData(
                f"genre {genre_name(int(code))} has only {count} example(s); at least 2 required"
            )

    scaler = fit_scaler(rows)
    z = scaler.apply(rows)

    return ModelBundle(
        scaler=scaler,
        knn=KnnClassifier().fit(z, labels),
        gnb=GaussianNaiveBayes().fit(z, labels),
        tree=DecisionTree().fit(z, labels),
        forest=RandomForest(seed=seed).fit(z, labels),
        mlp=MlpClassifier(seed=seed + 1).fit(z, labels),
        train_seed=seed,
    )
