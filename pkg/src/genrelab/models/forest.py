"""Bagged forest of CART trees with per-split column subsampling."""
from __future__ import annotations

import numpy as np

from ..errors import InsufficientData, ModelNotTrained
from ..genres import NUM_GENRES
from .tree import MAX_DEPTH, DecisionTree

NUM_TREES = 50
COLUMNS_PER_SPLIT = 8  # ceil(sqrt(57))


class RandomForest:
    """50 trees, each on a bootstrap resample with 8 columns per split.

    Tree t draws its bootstrap sample and its per-split column subsets
    from a generator seeded with seed + t, so the forest is reproducible
    from one integer. Prediction is the arithmetic mean of the trees' leaf
    distributions, summed in tree-index order. ``bootstrap=False`` together
    with ``max_features=None`` and ``num_trees=1`` reduces the forest to a
    single plain tree (test configuration).
    """

    def __init__(self, num_trees: int = NUM_TREES, seed: int = 0,
                 max_features: int | None = COLUMNS_PER_SPLIT,
                 bootstrap: bool = True, max_depth: int = MAX_DEPTH):
        self.num_trees = num_trees
        self.seed = seed
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.max_depth = max_depth
        self.trees: list[DecisionTree] | None = None

    def fit(self, x: np.ndarray, y: np.ndarray) -> "RandomForest":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if x.ndim != 2 or x.shape[0] < 2 or x.shape[0] != y.size:
            raise InsufficientData("forest needs >= 2 rows with matching labels")

        self.trees = []
        for index in range(self.num_trees):
            rng = np.random.default_rng(self.seed + index)
            if self.bootstrap:
                draw = rng.integers(0, x.shape[0], size=x.shape[0])
                sample_x, sample_y = x[draw], y[draw]
            else:
                sample_x, sample_y = x, y
            tree = DecisionTree(max_depth=self.max_depth, max_features=self.max_features)
            tree.fit(sample_x, sample_y, rng=rng)
            self.trees.append(tree)
        return self

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        if not self.trees:
            raise ModelNotTrained("forest was never fitted")
        total = np.zeros(NUM_GENRES)
        for tree in self.trees:  # fixed ascending order keeps sums stable
            total += tree.predict_proba(x)
        return total / len(self.trees)

    def predict(self, x: np.ndarray) -> int:
        return int(np.argmax(self.predict_proba(x)))

    def to_dict(self) -> dict:
        if not self.trees:
            raise ModelNotTrained("forest was never fitted")
        return {
            "num_trees": self.num_trees,
            "seed": self.seed,
            "max_features": self.max_features,
            "bootstrap": self.bootstrap,
            "max_depth": self.max_depth,
            "trees": [tree.to_dict() for tree in self.trees],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RandomForest":
        forest = cls(
            num_trees=int(doc["num_trees"]),
            seed=int(doc["seed"]),
            max_features=doc.get("max_features"),
            bootstrap=bool(doc["bootstrap"]),
            max_depth=int(doc["max_depth"]),
        )
        forest.trees = [DecisionTree.from_dict(t) for t in doc["trees"]]
        return forest
