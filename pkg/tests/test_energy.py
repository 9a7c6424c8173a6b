import numpy as np
import pytest
from scipy.spatial.distance import cdist

from edp_privacy.errors import InputError, InsufficientDataError
from edp_privacy.known_sample import energy_statistic, energy_two_sample_p, energy_two_sample_test
from edp_privacy.known_sample.energy import (
    PooledEnergy,
    permutation_labels,
    pvalue_from_statistics,
    subsample_sizes,
)


def energy_oracle(A, B):
    """Direct double loop over pairs."""
    p, r = A.shape[1], B.shape[1]
    ab = sum(np.linalg.norm(A[:, i] - B[:, j]) for i in range(p) for j in range(r)) / (p * r)
    aa = sum(np.linalg.norm(A[:, i] - A[:, j]) for i in range(p) for j in range(p)) / p**2
    bb = sum(np.linalg.norm(B[:, i] - B[:, j]) for i in range(r) for j in range(r)) / r**2
    return p * r / (p + r) * (2 * ab - aa - bb)


def test_statistic_matches_pairwise_oracle(rng):
    A = rng.standard_normal((3, 9))
    B = rng.standard_normal((3, 7)) + 0.5
    assert energy_statistic(A, B) == pytest.approx(energy_oracle(A, B), rel=1e-12)


def test_batched_statistics_match_per_split_oracle(rng):
    A = rng.standard_normal((2, 8))
    B = rng.standard_normal((2, 6))
    labels = permutation_labels(8, 6, 15, rng)
    pooled = PooledEnergy(cdist(A.T, A.T), cdist(B.T, B.T), labels)
    stats = pooled.statistics(cdist(A.T, B.T))
    P = np.hstack([A, B])
    for b in range(labels.shape[1]):
        mask = labels[:, b] == 1
        assert stats[b] == pytest.approx(energy_oracle(P[:, mask], P[:, ~mask]), rel=1e-10, abs=1e-12)


def test_identical_samples(rng):
    A = rng.standard_normal((3, 30))
    result = energy_two_sample_test(A, A.copy(), 199, rng)
    assert result.statistic == pytest.approx(0.0, abs=1e-12)
    assert result.pvalue > 1 / 200
    assert result.pvalue >= 0.5


def test_separated_samples_reach_the_floor(rng):
    A = rng.standard_normal((2, 50))
    B = rng.standard_normal((2, 50)) + 100.0
    assert energy_two_sample_p(A, B, 199, rng) == pytest.approx(1 / 200)


def test_null_calibration():
    rng = np.random.default_rng(77)
    cov = np.array([[2.0, 0.3, 0.0], [0.3, 1.0, 0.2], [0.0, 0.2, 0.5]])
    rejections = 0
    trials = 1000
    for _ in range(trials):
        A = rng.multivariate_normal(np.zeros(3), cov, 15).T
        B = rng.multivariate_normal(np.zeros(3), cov, 15).T
        rejections += energy_two_sample_p(A, B, 99, rng) <= 0.05
    assert abs(rejections / trials - 0.05) <= 0.02


def test_pvalue_counts_ties_as_exceeding():
    assert pvalue_from_statistics(np.array([1.0, 1.0, 0.5, 2.0])) == pytest.approx(3 / 4)


def test_subsample_sizes():
    assert subsample_sizes(100, 200, 2000) == (100, 200)
    assert subsample_sizes(200, 10000, 2000) == (200, 1800)
    assert subsample_sizes(5000, 300, 2000) == (1700, 300)
    assert subsample_sizes(5000, 5000, 2000) == (1000, 1000)
    with pytest.raises(InputError):
        subsample_sizes(10, 10, 3)


def test_subsampled_test_reports_pooled_size(rng):
    A = rng.standard_normal((2, 300))
    B = rng.standard_normal((2, 500))
    assert energy_two_sample_test(A, B, 19, rng, max_pooled=200).pooled_size == 200


def test_label_matrix_shape_and_observed_split(rng):
    L = permutation_labels(4, 3, 10, rng)
    assert L.shape == (7, 11)
    np.testing.assert_array_equal(L[:, 0], [1, 1, 1, 1, 0, 0, 0])
    np.testing.assert_array_equal(L.sum(axis=0), 4)


def test_errors(rng):
    with pytest.raises(InsufficientDataError):
        energy_two_sample_p(rng.standard_normal((2, 1)), rng.standard_normal((2, 5)))
    with pytest.raises(InputError):
        energy_two_sample_p(rng.standard_normal((2, 5)), rng.standard_normal((3, 5)))
    with pytest.raises(InputError):
        energy_two_sample_p(rng.standard_normal((2, 5)), rng.standard_normal((2, 5)), permutations=0)
