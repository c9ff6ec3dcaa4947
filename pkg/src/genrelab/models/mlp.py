"""Single-hidden-layer softmax network trained by mini-batch SGD.

Architecture 57 -> 32 (ReLU) -> 11 (softmax), cross-entropy loss. Weights
start uniform(-0.1, 0.1) from the seed, biases at zero; the same generator
then drives the per-epoch shuffles, so training is reproducible from one
integer. ``loss_and_grads`` exposes the analytic gradients for the
finite-difference check.
"""
from __future__ import annotations

import numpy as np

from ..errors import DegenerateLabels, DimensionMismatch, InsufficientData, ModelNotTrained
from ..genres import NUM_GENRES

HIDDEN_UNITS = 32
LEARNING_RATE = 0.01
BATCH_SIZE = 16
MAX_EPOCHS = 300
TARGET_LOSS = 0.05
INIT_SCALE = 0.1


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


class MlpClassifier:
    """57 -> 32 ReLU -> 11 softmax classifier."""

    def __init__(self, seed: int = 0, hidden_units: int = HIDDEN_UNITS,
                 learning_rate: float = LEARNING_RATE, batch_size: int = BATCH_SIZE,
                 max_epochs: int = MAX_EPOCHS, target_loss: float = TARGET_LOSS):
        self.seed = seed
        self.hidden_units = hidden_units
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.target_loss = target_loss
        self.w1 = self.b1 = self.w2 = self.b2 = None
        self.epochs_run = 0

    def init_params(self, num_inputs: int, rng: np.random.Generator | None = None) -> None:
        rng = rng or np.random.default_rng(self.seed)
        self.w1 = rng.uniform(-INIT_SCALE, INIT_SCALE, (num_inputs, self.hidden_units))
        self.b1 = np.zeros(self.hidden_units)
        self.w2 = rng.uniform(-INIT_SCALE, INIT_SCALE, (self.hidden_units, NUM_GENRES))
        self.b2 = np.zeros(NUM_GENRES)

    def _forward(self, x: np.ndarray):
        hidden = np.maximum(x @ self.w1 + self.b1, 0.0)
        probs = _softmax(hidden @ self.w2 + self.b2)
        return hidden, probs

    def loss_and_grads(self, x: np.ndarray, y: np.ndarray):
        """Mean cross-entropy over a batch and its analytic gradients."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        y = np.asarray(y, dtype=np.int64)
        n = x.shape[0]
        hidden, probs = self._forward(x)

        loss = float(-np.log(np.maximum(probs[np.arange(n), y], 1e-300)).mean())

        delta_out = probs.copy()
        delta_out[np.arange(n), y] -= 1.0
        delta_out /= n
        grad_w2 = hidden.T @ delta_out
        grad_b2 = delta_out.sum(axis=0)
        delta_hidden = (delta_out @ self.w2.T) * (hidden > 0.0)
        grad_w1 = x.T @ delta_hidden
        grad_b1 = delta_hidden.sum(axis=0)

        return loss, {"w1": grad_w1, "b1": grad_b1, "w2": grad_w2, "b2": grad_b2}

    def fit(self, x: np.ndarray, y: np.ndarray) -> "MlpClassifier":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if y.size == 0:
            raise DegenerateLabels("empty label vector")
        if x.ndim != 2 or x.shape[0] < 2 or x.shape[0] != y.size:
            raise InsufficientData("mlp needs >= 2 rows with matching labels")

        rng = np.random.default_rng(self.seed)
        self.init_params(x.shape[1], rng)

        n = x.shape[0]
        for epoch in range(self.max_epochs):
            order = rng.permutation(n)
            loss_sum = 0.0
            for start in range(0, n, self.batch_size):
                batch = order[start : start + self.batch_size]
                loss, grads = self.loss_and_grads(x[batch], y[batch])
                loss_sum += loss * batch.size
                self.w1 -= self.learning_rate * grads["w1"]
                self.b1 -= self.learning_rate * grads["b1"]
                self.w2 -= self.learning_rate * grads["w2"]
                self.b2 -= self.learning_rate * grads["b2"]
            self.epochs_run = epoch + 1
            if loss_sum / n < self.target_loss:
                break
        return self

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        if self.w1 is None:
            raise ModelNotTrained("mlp was never fitted")
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.w1.shape[0],):
            raise DimensionMismatch(f"query must have {self.w1.shape[0]} entries")
        _, probs = self._forward(x[None, :])
        return probs[0]

    def predict(self, x: np.ndarray) -> int:
        return int(np.argmax(self.predict_proba(x)))

    def to_dict(self) -> dict:
        if self.w1 is None:
            raise ModelNotTrained("mlp was never fitted")
        return {
            "seed": self.seed,
            "hidden_units": self.hidden_units,
            "w1": self.w1.tolist(),
            "b1": self.b1.tolist(),
            "w2": self.w2.tolist(),
            "b2": self.b2.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MlpClassifier":
        model = cls(seed=int(doc["seed"]), hidden_units=int(doc["hidden_units"]))
        model.w1 = np.array(doc["w1"], dtype=np.float64)
        model.b1 = np.array(doc["b1"], dtype=np.float64)
        model.w2 = np.array(doc["w2"], dtype=np.float64)
        model.b2 = np.array(doc["b2"], dtype=np.float64)
        return model
