import numpy as np
import pytest

from genrelab.errors import DegenerateLabels, DimensionMismatch
from genrelab.models import GaussianNaiveBayes


def fit_two_class_1d():
    # class 2 ~ {0, 2}, class 5 ~ {4, 6}: means 1 and 5, population var 1
    x = np.array([[0.0], [2.0], [4.0], [6.0]])
    y = np.array([2, 2, 5, 5])
    return GaussianNaiveBayes().fit(x, y)


class TestGaussianNaiveBayes:
    def test_symmetric_query_splits_evenly(self):
        model = fit_two_class_1d()
        probs = model.predict_proba(np.array([3.0]))
        assert probs[2] == pytest.approx(0.5, abs=1e-9)
        assert probs[5] == pytest.approx(0.5, abs=1e-9)

    def test_hand_computed_posterior(self):
        # log ratio = ((1-5)^2 - (1-1)^2) / (2 var) = 8 -> P = 1/(1+e^-8)
        model = fit_two_class_1d()
        probs = model.predict_proba(np.array([1.0]))
        assert probs[2] == pytest.approx(1.0 / (1.0 + np.exp(-8.0)), abs=1e-5)
        assert probs[2] == pytest.approx(0.99966, abs=1e-4)

    def test_single_class_training_set(self):
        x = np.array([[1.0], [2.0], [3.0]])
        y = np.array([7, 7, 7])
        model = GaussianNaiveBayes().fit(x, y)
        probs = model.predict_proba(np.array([100.0]))
        assert probs[7] == 1.0
        assert probs.sum() == 1.0

    def test_variance_smoothing_keeps_constant_columns_usable(self):
        x = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 10.0], [1.0, 11.0]])
        y = np.array([0, 0, 1, 1])
        model = GaussianNaiveBayes().fit(x, y)
        probs = model.predict_proba(np.array([1.0, 0.5]))
        assert np.all(np.isfinite(probs))
        assert probs[0] > probs[1]

    def test_priors_follow_class_counts(self):
        x = np.array([[0.0], [0.1], [0.2], [10.0]])
        y = np.array([3, 3, 3, 9])
        model = GaussianNaiveBayes().fit(x, y)
        assert model.priors[list(model.classes).index(3)] == pytest.approx(0.75)

    def test_distribution_sums_to_one(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(30, 6))
        y = rng.integers(0, 11, 30)
        model = GaussianNaiveBayes().fit(x, y)
        for _ in range(10):
            probs = model.predict_proba(rng.normal(size=6))
            assert probs.sum() == pytest.approx(1.0, abs=1e-9)
            assert np.all(probs >= 0.0)

    def test_errors(self):
        with pytest.raises(DegenerateLabels):
            GaussianNaiveBayes().fit(np.zeros((0, 2)), np.array([], dtype=int))
        model = fit_two_class_1d()
        with pytest.raises(DimensionMismatch):
            model.predict_proba(np.zeros(2))

    def test_round_trip_dict(self):
        model = fit_two_class_1d()
        restored = GaussianNaiveBayes.from_dict(model.to_dict())
        query = np.array([1.7])
        assert np.array_equal(model.predict_proba(query), restored.predict_proba(query))
