"""Five independently trained classifiers behind one predict_proba contract.

Every model maps a standardized 57-value feature vector to a probability
distribution over the 11 genres (entries in [0, 1], sum 1). Training and
prediction are deterministic: fixed seeds, fixed tie-breaking rules, fixed
summation orders.
"""

from .scaler import Scaler, fit_scaler
from .knn import KnnClassifier
from .naive_bayes import GaussianNaiveBayes
from .tree import DecisionTree, gini_impurity
from .forest import RandomForest
from .mlp import MlpClassifier
from .bundle import ModelBundle, train_all, MODEL_NAMES

__all__ = [
    "Scaler",
    "fit_scaler",
    "KnnClassifier",
    "GaussianNaiveBayes",
    "DecisionTree",
    "gini_impurity",
    "RandomForest",
    "MlpClassifier",
    "ModelBundle",
    "train_all",
    "MODEL_NAMES",
]
