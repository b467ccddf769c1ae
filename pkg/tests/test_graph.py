import numpy as np
import pytest

from agcsc.graph import (
    affinity_from_coefficients,
    aggregate_features,
    gco_from_coefficients,
    off_block_energy_fraction,
    threshold_m_largest,
)

import oracles


class TestGco:
    def test_zero_coefficients(self):
        assert np.array_equal(gco_from_coefficients(np.zeros((3, 3))), np.eye(3) / 2.0)

    def test_identity_coefficients(self):
        assert np.array_equal(gco_from_coefficients(np.eye(4)), np.eye(4))

    def test_row_stochastic_input_gives_row_stochastic_operator(self):
        rng = np.random.default_rng(0)
        C = rng.random((5, 5))
        C /= C.sum(axis=1, keepdims=True)
        S = gco_from_coefficients(C)
        assert np.allclose(S.sum(axis=1), np.ones(5), atol=1e-12)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            gco_from_coefficients(np.zeros((2, 3)))


class TestAggregateFeatures:
    def test_identity_operator(self):
        X = np.random.default_rng(1).standard_normal((4, 3))
        assert np.array_equal(aggregate_features(np.eye(4), X), X)

    def test_halving_operator(self):
        X = np.random.default_rng(2).standard_normal((4, 3))
        assert np.array_equal(aggregate_features(np.eye(4) / 2.0, X), X / 2.0)

    def test_matches_naive_product(self):
        rng = np.random.default_rng(3)
        S = rng.standard_normal((4, 4))
        X = rng.standard_normal((4, 3))
        assert np.abs(aggregate_features(S, X) - oracles.naive_matmul(S, X)).max() <= 1e-12

    def test_rejects_mismatched_dims(self):
        with pytest.raises(ValueError):
            aggregate_features(np.eye(3), np.zeros((4, 2)))


class TestAffinity:
    def test_symmetric_nonnegative_fixed_point(self):
        rng = np.random.default_rng(4)
        C = np.abs(rng.standard_normal((5, 5)))
        C = (C + C.T) / 2.0
        assert np.array_equal(affinity_from_coefficients(C), C)

    def test_hand_case(self):
        C = np.array([[0.0, 1.0], [-1.0, 0.0]])
        assert np.array_equal(affinity_from_coefficients(C), np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_always_symmetric_nonnegative(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            A = affinity_from_coefficients(rng.standard_normal((6, 6)))
            assert np.array_equal(A, A.T)
            assert (A >= 0.0).all()


class TestThreshold:
    def test_keep_all_when_m_at_least_n(self):
        rng = np.random.default_rng(6)
        C = rng.standard_normal((4, 4))
        assert np.array_equal(threshold_m_largest(C, 4), C)
        assert np.array_equal(threshold_m_largest(C, 9), C)

    def test_column_example(self):
        C = np.diag([0.0, 0.0, 0.0])
        C[:, 0] = [0.5, 0.3, 0.1]
        out = threshold_m_largest(C, 2)
        assert np.array_equal(out[:, 0], [0.5, 0.3, 0.0])

    def test_matches_sort_and_mask_oracle(self):
        rng = np.random.default_rng(7)
        C = rng.standard_normal((8, 8))
        for m in (1, 3, 8):
            out = threshold_m_largest(C, m)
            for j in range(8):
                order = sorted(range(8), key=lambda i: (-abs(C[i, j]), i))
                expected = np.zeros(8)
                for i in order[:m]:
                    expected[i] = C[i, j]
                assert np.array_equal(out[:, j], expected)

    def test_ties_keep_lower_row_index(self):
        C = np.zeros((3, 3))
        C[:, 1] = [2.0, -2.0, 2.0]
        out = threshold_m_largest(C, 2)
        assert np.array_equal(out[:, 1], [2.0, -2.0, 0.0])

    def test_kept_entries_bit_exact_and_count_bounded(self):
        rng = np.random.default_rng(8)
        C = rng.standard_normal((9, 9)) * 1e-7
        for m in (1, 2, 5):
            out = threshold_m_largest(C, m)
            kept = out != 0.0
            assert (kept.sum(axis=0) <= m).all()
            assert np.array_equal(out[kept], C[kept])

    def test_thresholded_affinity_symmetric_nonnegative(self):
        rng = np.random.default_rng(9)
        for m in (1, 3, 12):
            A = affinity_from_coefficients(threshold_m_largest(rng.standard_normal((7, 7)), m))
            assert np.array_equal(A, A.T)
            assert (A >= 0.0).all()

    def test_rejects_bad_m(self):
        with pytest.raises(ValueError):
            threshold_m_largest(np.zeros((3, 3)), 0)


class TestOffBlockEnergy:
    def test_block_diagonal_is_zero(self):
        A = np.zeros((4, 4))
        A[:2, :2] = 1.0
        A[2:, 2:] = 1.0
        assert off_block_energy_fraction(A, [0, 0, 1, 1]) == 0.0

    def test_uniform_affinity(self):
        A = np.ones((4, 4))
        # 8 of 16 entries cross the two blocks
        assert off_block_energy_fraction(A, [0, 0, 1, 1]) == pytest.approx(0.5)

    def test_thresholding_concentrates_within_blocks(self):
        rng = np.random.default_rng(10)
        labels = np.repeat([0, 1, 2], 6)
        within = (labels[:, None] == labels[None, :]).astype(float)
        C = within * rng.uniform(0.5, 1.0, (18, 18)) + rng.uniform(0.0, 0.3, (18, 18))
        before = off_block_energy_fraction(affinity_from_coefficients(C), labels)
        after = off_block_energy_fraction(
            affinity_from_coefficients(threshold_m_largest(C, 6)), labels
        )
        assert after < before
