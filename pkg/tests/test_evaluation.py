import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genrelab.errors import EmptyGrid, EmptyPredictions, EmptyTruthSet
from genrelab.evaluation import (
    GREEN,
    RED,
    ClassificationReport,
    aggregate_grid,
    classify_report,
    compute_metrics,
    f1_from_precision_recall,
    grid_to_csv,
    load_grid_csv,
    run_protocol,
    run_success,
)
from genrelab.genres import genre_code
from genrelab.models import MODEL_NAMES

from conftest import make_click_track


def report_with_tops(tops: dict[str, int]) -> ClassificationReport:
    per_algorithm = {}
    for name in MODEL_NAMES:
        probs = np.full(11, 0.01)
        probs[tops[name]] += 1.0 - probs.sum()
        per_algorithm[name] = probs
    consensus = sum(per_algorithm.values()) / 5
    return ClassificationReport(
        report_id="x" * 32, created_at="2026-01-01T00:00:00Z",
        per_algorithm=per_algorithm, consensus=consensus,
        top_genre=int(np.argmax(consensus)), confidence=float(consensus.max()),
        tempo_bpm=120.0, features=np.zeros(57),
    )


class TestConsensus:
    def test_uniform_distributions_give_uniform_consensus(self):
        per_algorithm = {name: np.full(11, 1 / 11) for name in MODEL_NAMES}
        consensus = sum(per_algorithm.values()) / 5
        assert consensus == pytest.approx(np.full(11, 1 / 11))
        assert consensus.max() == pytest.approx(1 / 11)

    def test_four_certain_one_uniform(self):
        g = 3
        certain = np.zeros(11)
        certain[g] = 1.0
        uniform = np.full(11, 1 / 11)
        consensus = (4 * certain + uniform) / 5
        assert consensus[g] == pytest.approx((4 + 1 / 11) / 5)
        assert consensus[g] == pytest.approx(0.8182, abs=1e-4)


class TestRunSuccess:
    def test_one_matching_model_is_green(self):
        # truth {Country, Blues}; one model predicts Blues
        report = report_with_tops(
            {"knn": 8, "gnb": 8, "tree": 0, "forest": 8, "mlp": 8}
        )
        truth = {genre_code("Country"), genre_code("Blues")}
        assert run_success(report, truth) == GREEN

    def test_no_matching_model_is_red(self):
        report = report_with_tops(
            {name: 10 for name in MODEL_NAMES}  # everything Rock
        )
        assert run_success(report, {genre_code("Pop")}) == RED

    def test_empty_truth_rejected(self):
        report = report_with_tops({name: 0 for name in MODEL_NAMES})
        with pytest.raises(EmptyTruthSet):
            run_success(report, set())

    @settings(max_examples=30, deadline=None)
    @given(
        tops=st.lists(st.integers(0, 10), min_size=5, max_size=5),
        truth=st.sets(st.integers(0, 10), min_size=1, max_size=5),
        extra=st.sets(st.integers(0, 10), min_size=0, max_size=5),
    )
    def test_monotone_in_truth(self, tops, truth, extra):
        report = report_with_tops(dict(zip(MODEL_NAMES, tops)))
        if run_success(report, truth) == GREEN:
            assert run_success(report, truth | extra) == GREEN


@pytest.fixture()
def bundle(blob_bundle):
    return blob_bundle[0]


class TestProtocol:

    def test_grid_shape_and_determinism(self, bundle):
        songs = [
            (f"song_{i}", make_click_track(90.0 + 10 * i, duration_s=31.0, seed=i), {2, 8})
            for i in range(2)
        ]
        grid_a = run_protocol(bundle, songs, runs=5, seed=4)
        grid_b = run_protocol(bundle, songs, runs=5, seed=4)
        assert grid_a.total == 10
        assert grid_to_csv(grid_a) == grid_to_csv(grid_b)

    def test_single_green_run_rate(self, bundle):
        songs = [("one", make_click_track(100.0, duration_s=5.0), set(range(11)))]
        grid = run_protocol(bundle, songs, runs=1, seed=0)
        assert grid.total == 1
        assert grid.success_rate == 1.0  # truth covers every genre

    def test_failing_clip_scores_red_with_note(self, bundle):
        from genrelab.audio import AudioClip

        short = AudioClip(samples=np.zeros(22050), sample_rate=22050)  # 1 s
        grid = run_protocol(bundle, [("bad", short, {0})], runs=2, seed=1)
        assert grid.total == 2
        assert all(o.result == RED for o in grid.rows[0].outcomes)
        assert all(o.note for o in grid.rows[0].outcomes)

    def test_empty_truth_aborts(self, bundle):
        songs = [("x", make_click_track(100.0, duration_s=4.0), set())]
        with pytest.raises(EmptyTruthSet):
            run_protocol(bundle, songs, runs=1, seed=0)


class TestAggregateGrid:
    def test_all_green(self):
        grid = aggregate_grid(
            [f"s{i}" for i in range(10)],
            [{0}] * 10,
            [[GREEN] * 5] * 10,
        )
        assert grid.success_count == 50
        assert grid.success_rate == 1.0

    def test_all_red(self):
        grid = aggregate_grid(["s"], [{0}], [[RED] * 5])
        assert grid.success_rate == 0.0

    def test_empty_rejected(self):
        with pytest.raises(EmptyGrid):
            aggregate_grid([], [], [])

    def test_ragged_rejected(self):
        with pytest.raises(ValueError):
            aggregate_grid(["a", "b"], [{0}, {1}], [[GREEN], [GREEN, RED]])

    def test_exact_rational_rate(self):
        from fractions import Fraction

        grid = aggregate_grid(
            ["a", "b"], [{0}, {1}], [[GREEN, RED, GREEN], [RED, RED, GREEN]]
        )
        assert Fraction(grid.success_count, grid.total) == Fraction(3, 6)
        assert grid.success_rate * grid.total == grid.success_count


class TestMetrics:
    def test_published_f1_identity(self):
        # the five reported (precision, recall) pairs reproduce the printed
        # F1 values within +-0.5
        published = [
            ("Neural Networks", 88.0, 92.0, 90.0),
            ("Decision Trees", 82.0, 87.0, 84.0),
            ("Random Forest", 86.0, 89.0, 87.0),
            ("k-Nearest Neighbor", 80.0, 84.0, 82.0),
            ("Naive Bayes", 84.0, 88.0, 86.0),
        ]
        for name, precision, recall, printed_f1 in published:
            f1 = f1_from_precision_recall(precision, recall)
            assert abs(f1 - printed_f1) <= 0.5, name

    def test_nn_row_value(self):
        assert f1_from_precision_recall(88.0, 92.0) == pytest.approx(89.9556, abs=1e-3)

    def test_perfect_predictions(self):
        row = compute_metrics([(3, 3), (5, 5), (7, 7)], model="m")
        assert (row.accuracy, row.precision, row.recall, row.f1) == (100, 100, 100, 100)

    def test_hand_confusion_case(self):
        # confusion [[2,1],[0,1]] over classes {0, 1}
        predictions = [(0, 0), (0, 0), (1, 0), (1, 1)]
        row = compute_metrics(predictions)
        assert row.accuracy == pytest.approx(75.0)
        assert row.precision == pytest.approx(75.0)
        assert row.recall == pytest.approx(100 * (2 / 3 + 1.0) / 2)
        assert row.f1 == pytest.approx(78.947, abs=1e-2)

    def test_zero_predicted_positive_counts_as_zero_precision(self):
        predictions = [(0, 0), (0, 1)]  # class 1 never predicted
        row = compute_metrics(predictions)
        assert row.precision == pytest.approx(100 * (0.5 + 0.0) / 2)

    def test_empty_rejected(self):
        with pytest.raises(EmptyPredictions):
            compute_metrics([])

    @settings(max_examples=40, deadline=None)
    @given(p=st.floats(0.0, 100.0), r=st.floats(0.0, 100.0))
    def test_f1_identity_holds_globally(self, p, r):
        f1 = f1_from_precision_recall(p, r)
        if p + r > 0:
            assert f1 == pytest.approx(2 * p * r / (p + r))
        else:
            assert f1 == 0.0


class TestGridCsv:
    def test_round_trip(self):
        grid = aggregate_grid(
            ["alpha", "beta"],
            [{genre_code("Rock")}, {genre_code("Jazz"), genre_code("Blues")}],
            [[GREEN, RED], [RED, RED]],
        )
        text = grid_to_csv(grid)
        assert "success_rate=25.0%" in text
        reloaded = load_grid_csv(text)
        assert reloaded.success_count == grid.success_count
        assert reloaded.rows[1].truth == grid.rows[1].truth

    def test_rejects_bad_header(self):
        with pytest.raises(ValueError):
            load_grid_csv("nope,really\n")
