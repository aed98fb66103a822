"""Ranking-consistency weights and scores."""

import numpy as np
import pytest

from oracles import softmax_weights
from polyprune.errors import ValidationError
from polyprune.rankc import consistency, precision_at_j, rank_weights, rankc


class TestRankWeights:
    def test_single_label(self):
        np.testing.assert_allclose(rank_weights(1), [1.0])

    def test_two_labels(self):
        np.testing.assert_allclose(rank_weights(2), [0.7310586, 0.2689414], atol=1e-6)

    def test_three_labels(self):
        np.testing.assert_allclose(
            rank_weights(3), [0.6652409, 0.2447285, 0.0900306], atol=1e-6
        )

    def test_matches_direct_arithmetic(self):
        for y in (1, 2, 3, 5, 11):
            np.testing.assert_allclose(rank_weights(y), softmax_weights(y), rtol=1e-12)

    def test_decreasing_and_normalized_up_to_twenty(self):
        for y in range(1, 21):
            w = rank_weights(y)
            assert (np.diff(w) < 0).all() or y == 1
            assert w.sum() == pytest.approx(1.0, abs=1e-12)

    def test_zero_labels_rejected(self):
        with pytest.raises(ValidationError):
            rank_weights(0)


class TestPrecisionAtJ:
    def test_identical_rankings(self):
        for j in (1, 2, 3):
            assert precision_at_j(("A", "B", "C"), ("A", "B", "C"), j) == 1.0

    def test_hand_enumeration(self):
        assert precision_at_j(("A", "B", "C"), ("C", "B", "A"), 2) == 0.5

    def test_full_rank_always_one(self):
        assert precision_at_j(("A", "B", "C"), ("B", "C", "A"), 3) == 1.0

    def test_j_out_of_range(self):
        with pytest.raises(ValidationError):
            precision_at_j(("A", "B"), ("A", "B"), 3)


class TestConsistency:
    def test_identical_is_one(self):
        assert consistency(("A", "B", "C"), ("A", "B", "C")) == pytest.approx(1.0, abs=1e-12)

    def test_adjacent_swap(self):
        assert consistency(("A", "B", "C"), ("B", "A", "C")) == pytest.approx(
            0.3347591, abs=1e-6
        )

    def test_full_reversal(self):
        assert consistency(("A", "B", "C"), ("C", "B", "A")) == pytest.approx(
            0.2123949, abs=1e-6
        )

    def test_symmetric(self):
        rng = np.random.default_rng(0)
        labels = list("ABCDE")
        for _ in range(20):
            a = tuple(rng.permutation(labels))
            b = tuple(rng.permutation(labels))
            assert consistency(a, b) == pytest.approx(consistency(b, a), abs=1e-12)

    def test_positive_and_one_only_for_identity(self):
        rng = np.random.default_rng(1)
        labels = list("ABCD")
        for _ in range(20):
            a = tuple(rng.permutation(labels))
            b = tuple(rng.permutation(labels))
            value = consistency(a, b)
            assert 0.0 < value <= 1.0
            if a != b:
                assert value < 1.0

    def test_label_set_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            consistency(("A", "B"), ("A", "C"))


class TestRankC:
    def test_all_identical_pairs(self):
        pairs = [(("A", "B"), ("A", "B"))] * 3
        assert rankc(pairs) == pytest.approx(1.0, abs=1e-12)

    def test_mean_of_known_values(self):
        pairs = [
            (("A", "B", "C"), ("A", "B", "C")),
            (("A", "B", "C"), ("B", "A", "C")),
        ]
        assert rankc(pairs) == pytest.approx(0.6673796, abs=1e-6)

    def test_order_invariance(self):
        pairs = [
            (("A", "B", "C"), ("C", "B", "A")),
            (("A", "B", "C"), ("B", "A", "C")),
            (("A", "B", "C"), ("A", "C", "B")),
        ]
        assert rankc(pairs) == pytest.approx(rankc(pairs[::-1]), abs=1e-12)

    def test_within_convex_hull(self):
        pairs = [
            (("A", "B", "C"), ("C", "B", "A")),
            (("A", "B", "C"), ("A", "B", "C")),
        ]
        values = [consistency(a, b) for a, b in pairs]
        assert min(values) <= rankc(pairs) <= max(values)

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            rankc([])
