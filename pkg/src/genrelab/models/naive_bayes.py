"""Gaussian naive bayes over standardized feature columns."""
from __future__ import annotations

import numpy as np

from ..errors import DegenerateLabels, DimensionMismatch, InsufficientData, ModelNotTrained
from ..genres import NUM_GENRES

VARIANCE_SMOOTHING = 1e-9


class GaussianNaiveBayes:
    """Per-class diagonal Gaussians with empirical priors.

    Every class variance is smoothed by 1e-9 times the largest column
    variance over the whole training set, so zero-variance columns stay
    usable. Posteriors are computed in the log domain.
    """

    def __init__(self):
        self.classes: np.ndarray | None = None
        self.priors: np.ndarray | None = None
        self.means: np.ndarray | None = None
        self.variances: np.ndarray | None = None

    def fit(self, x: np.ndarray, y: np.ndarray) -> "GaussianNaiveBayes":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if y.size == 0:
            raise DegenerateLabels("empty label vector")
        if x.ndim != 2 or x.shape[0] < 2 or x.shape[0] != y.size:
            raise InsufficientData("naive bayes needs >= 2 rows with matching labels")

        self.classes = np.unique(y)
        smoothing = VARIANCE_SMOOTHING * float(x.var(axis=0).max())
        self.priors = np.empty(self.classes.size)
        self.means = np.empty((self.classes.size, x.shape[1]))
        self.variances = np.empty((self.classes.size, x.shape[1]))
        for i, cls in enumerate(self.classes):
            rows = x[y == cls]
            self.priors[i] = rows.shape[0] / x.shape[0]
            self.means[i] = rows.mean(axis=0)
            self.variances[i] = rows.var(axis=0) + smoothing
        return self

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        if self.classes is None:
            raise ModelNotTrained("naive bayes was never fitted")
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.means.shape[1],):
            raise DimensionMismatch(f"query must have {self.means.shape[1]} entries")

        log_likelihood = -0.5 * (
            np.log(2.0 * np.pi * self.variances)
            + (x - self.means) ** 2 / self.variances
        ).sum(axis=1)
        log_posterior = np.log(self.priors) + log_likelihood
        log_posterior -= log_posterior.max()
        posterior = np.exp(log_posterior)
        posterior /= posterior.sum()

        probs = np.zeros(NUM_GENRES)
        probs[self.classes] = posterior
        return probs

    def predict(self, x: np.ndarray) -> int:
        return int(np.argmax(self.predict_proba(x)))

    def to_dict(self) -> dict:
        if self.classes is None:
            raise ModelNotTrained("naive bayes was never fitted")
        return {
            "classes": self.classes.tolist(),
            "priors": self.priors.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GaussianNaiveBayes":
        model = cls()
        model.classes = np.array(doc["classes"], dtype=np.int64)
        model.priors = np.array(doc["priors"], dtype=np.float64)
        model.means = np.array(doc["means"], dtype=np.float64)
        model.variances = np.array(doc["variances"], dtype=np.float64)
        return model
