import numpy as np
import pytest

from stcsta.core import Feature, ReadingMatrix, RoundConfig, StreamId
from stcsta.energy import ActivityCounters
from stcsta.metrics import correlation_census, quality, traffic_pcts
from conftest import make_matrix


def two_feature_matrix(values_by_feature):
    streams = []
    rows = []
    for feature, block in values_by_feature.items():
        for i, row in enumerate(block):
            streams.append(StreamId(i, feature))
            rows.append(row)
    values = np.asarray(rows, dtype=float)
    ts = np.arange(values.shape[1], dtype=float)
    return ReadingMatrix(streams, values, ts)


class TestQuality:
    def test_perfect_reconstruction(self):
        truth = make_matrix(np.arange(20.0).reshape(2, 10))
        mask = np.zeros((2, 10), dtype=bool)
        mask[0, 3] = True
        scores = quality(truth, truth, mask)
        assert scores["overall"].rmse == 0.0
        assert scores["overall"].mae == 0.0

    def test_plus_minus_one_errors(self):
        truth = make_matrix(np.zeros((1, 4)))
        completed_vals = np.zeros((1, 4))
        completed_vals[0, 1] = 1.0
        completed_vals[0, 2] = -1.0
        mask = np.zeros((1, 4), dtype=bool)
        mask[0, 1] = mask[0, 2] = True
        scores = quality(truth, make_matrix(completed_vals), mask)
        assert scores["overall"].rmse == 1.0
        assert scores["overall"].mae == 1.0

    def test_single_cell_error_three(self):
        truth = make_matrix(np.zeros((1, 3)))
        completed_vals = np.zeros((1, 3))
        completed_vals[0, 0] = 3.0
        mask = np.zeros((1, 3), dtype=bool)
        mask[0, 0] = True
        scores = quality(truth, make_matrix(completed_vals), mask)
        assert scores["overall"].rmse == 3.0
        assert scores["overall"].mae == 3.0

    def test_per_feature_split(self):
        truth = two_feature_matrix(
            {
                Feature.AMBIENT_TEMP: np.zeros((1, 4)),
                Feature.WIND_SPEED: np.zeros((1, 4)),
            }
        )
        completed_vals = np.zeros((2, 4))
        completed_vals[0, 0] = 1.0  # ambient error 1
        completed_vals[1, 0] = 2.0  # wind error 2
        completed = ReadingMatrix(truth.streams, completed_vals, truth.slot_timestamps)
        mask = np.zeros((2, 4), dtype=bool)
        mask[:, 0] = True
        scores = quality(truth, completed, mask)
        assert scores[Feature.AMBIENT_TEMP].rmse == 1.0
        assert scores[Feature.WIND_SPEED].rmse == 2.0
        assert scores["overall"].mae == 1.5

    def test_feature_without_masked_cells_absent(self):
        truth = two_feature_matrix(
            {
                Feature.AMBIENT_TEMP: np.zeros((1, 4)),
                Feature.WIND_SPEED: np.zeros((1, 4)),
            }
        )
        mask = np.zeros((2, 4), dtype=bool)
        mask[0, 1] = True
        scores = quality(truth, truth, mask)
        assert Feature.AMBIENT_TEMP in scores
        assert Feature.WIND_SPEED not in scores

    def test_empty_mask_gives_no_scores(self):
        truth = make_matrix(np.zeros((1, 4)))
        scores = quality(truth, truth, np.zeros((1, 4), dtype=bool))
        assert scores == {}

    def test_rmse_at_least_mae(self):
        rng = np.random.default_rng(0)
        truth = make_matrix(np.zeros((3, 50)))
        completed = make_matrix(rng.normal(size=(3, 50)))
        mask = rng.random((3, 50)) < 0.4
        scores = quality(truth, completed, mask)
        for s in scores.values():
            assert s.rmse >= s.mae >= 0.0

    def test_dimension_mismatch(self):
        truth = make_matrix(np.zeros((2, 4)))
        completed = make_matrix(np.zeros((2, 5)))
        with pytest.raises(ValueError):
            quality(truth, completed, np.zeros((2, 4), dtype=bool))
        with pytest.raises(ValueError):
            quality(truth, truth, np.zeros((3, 4), dtype=bool))


class TestTrafficPcts:
    def test_fixed_max_is_100(self):
        rc = RoundConfig(600.0, 50, 10)
        counters = {
            StreamId(i, Feature.AMBIENT_TEMP): ActivityCounters(
                samples=500, tx_packets=500
            )
            for i in range(3)
        }
        per_node, cluster = traffic_pcts(counters, rc, 10)
        assert cluster == (100.0, 100.0)
        assert all(p == (100.0, 100.0) for p in per_node.values())

    def test_half_reduction_from_round_two(self):
        # dense round 1 (50 samples) then 9 rounds at 25: 275/500 = 55%
        rc = RoundConfig(600.0, 50, 10)
        counters = {
            StreamId(i, Feature.AMBIENT_TEMP): ActivityCounters(
                samples=50 + 9 * 25, tx_packets=50 + 9 * 25
            )
            for i in range(4)
        }
        _, cluster = traffic_pcts(counters, rc, 10)
        assert cluster == (55.0, 55.0)

    def test_zero_rounds_absent(self):
        per_node, cluster = traffic_pcts({}, RoundConfig(600.0, 50, 10), 0)
        assert per_node == {}
        assert cluster is None

    def test_invariant_under_node_relabeling(self):
        rc = RoundConfig(600.0, 50, 4)
        c1 = {
            StreamId(1, Feature.AMBIENT_TEMP): ActivityCounters(samples=80, tx_packets=70),
            StreamId(2, Feature.AMBIENT_TEMP): ActivityCounters(samples=120, tx_packets=110),
        }
        c2 = {
            StreamId(9, Feature.AMBIENT_TEMP): ActivityCounters(samples=80, tx_packets=70),
            StreamId(4, Feature.AMBIENT_TEMP): ActivityCounters(samples=120, tx_packets=110),
        }
        _, cluster1 = traffic_pcts(c1, rc, 4)
        _, cluster2 = traffic_pcts(c2, rc, 4)
        assert cluster1 == cluster2

    def test_per_node_averages_features(self):
        rc = RoundConfig(600.0, 10, 1)
        counters = {
            StreamId(0, Feature.AMBIENT_TEMP): ActivityCounters(samples=10, tx_packets=10),
            StreamId(0, Feature.WIND_SPEED): ActivityCounters(samples=5, tx_packets=5),
        }
        per_node, cluster = traffic_pcts(counters, rc, 1)
        assert per_node[0] == (75.0, 75.0)
        assert cluster == (75.0, 75.0)


class TestCorrelationCensus:
    def test_identical_streams(self):
        base = np.sin(np.arange(40.0))
        truth = make_matrix(np.stack([base] * 5))
        counts, mean_counts = correlation_census(truth, 0.5, 20)
        assert counts.shape == (5, 2)
        assert (counts == 4).all()
        assert np.array_equal(mean_counts, np.full(5, 4.0))

    def test_independent_white_noise(self):
        rng = np.random.default_rng(1)
        truth = make_matrix(rng.normal(size=(6, 1000)))
        _, mean_counts = correlation_census(truth, 0.5, 500)
        assert mean_counts.mean() < 0.5

    def test_threshold_one_duplicated_pair(self):
        rng = np.random.default_rng(2)
        row = rng.normal(size=30)
        truth = make_matrix(np.stack([row, rng.normal(size=30), row.copy()]))
        counts, _ = correlation_census(truth, 1.0)
        assert counts[0, 0] == 1
        assert counts[2, 0] == 1
        assert counts[1, 0] == 0

    def test_default_period_spans_matrix(self):
        truth = make_matrix(np.sin(np.arange(30.0)).reshape(1, 30) * np.ones((2, 1)))
        counts, _ = correlation_census(truth, 0.5)
        assert counts.shape == (2, 1)

    def test_invalid_threshold(self):
        truth = make_matrix(np.zeros((2, 10)))
        with pytest.raises(ValueError):
            correlation_census(truth, -1.0)
        with pytest.raises(ValueError):
            correlation_census(truth, 1.5)

    def test_short_matrix_rejected(self):
        truth = make_matrix(np.zeros((2, 5)))
        with pytest.raises(ValueError):
            correlation_census(truth, 0.5, 10)
