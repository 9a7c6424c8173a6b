import warnings

import numpy as np
import pytest

from edp_privacy.errors import BudgetError, InsufficientDataError
from edp_privacy.known_sample import (
    all_sign_vectors,
    estimate_rotation,
    pca_attack_general,
    pca_attack_orthogonal,
    sign_search,
)
from edp_privacy.known_sample.pca import pair_differences
from edp_privacy.linalg import EigenGapWarning, eigen_sorted, haar_orthogonal, sample_covariance


def _skewed(rng, m, scales=(1.0, 3.0, 9.0)):
    """Independent exponential attributes: asymmetric along every axis."""
    return np.asarray(scales)[:, None] * rng.exponential(size=(len(scales), m))


def _random_cov(rng, n):
    Q = haar_orthogonal(n, rng)
    values = np.sort(rng.uniform(1.0, 10.0, n))[::-1] * (1.0 + np.arange(n))[::-1]
    return Q @ np.diag(values) @ Q.T


def test_sign_vectors_are_lexicographic():
    table = all_sign_vectors(2)
    np.testing.assert_array_equal(table, [[-1, -1], [-1, 1], [1, -1], [1, 1]])
    assert all_sign_vectors(1).shape == (2, 1)


def test_one_dimension_scores_two_candidates(rng):
    S = rng.exponential(size=(1, 50))
    Y = -rng.exponential(size=(1, 50))
    result = sign_search(np.eye(1), np.eye(1), S, Y, 99, rng)
    assert result.pvalues.size == 2
    assert result.signs.tolist() == [-1.0]


def test_eigenvectors_rotate_with_the_data(rng):
    for _ in range(20):
        Sigma = _random_cov(rng, 4)
        M = haar_orthogonal(4, rng)
        base = eigen_sorted(Sigma)
        moved = eigen_sorted(M @ Sigma @ M.T)
        np.testing.assert_allclose(moved.values, base.values, atol=1e-8)
        for i in range(4):
            target = M @ base.vectors[:, i]
            err = min(np.max(np.abs(moved.vectors[:, i] - target)), np.max(np.abs(moved.vectors[:, i] + target)))
            assert err <= 1e-7


def test_some_sign_matrix_reconstructs_the_rotation(rng):
    for _ in range(10):
        Sigma = _random_cov(rng, 3)
        M = haar_orthogonal(3, rng)
        Z = eigen_sorted(Sigma).vectors
        W = eigen_sorted(M @ Sigma @ M.T).vectors
        best = min(np.max(np.abs(W @ np.diag(d) @ Z.T - M)) for d in all_sign_vectors(3))
        assert best <= 1e-7


def test_true_signs_win_on_asymmetric_data():
    wins = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        X = _skewed(rng, 600)
        M = haar_orthogonal(3, rng)
        Y = M @ X
        Z = eigen_sorted(sample_covariance(X)).vectors
        W = eigen_sorted(sample_covariance(Y)).vectors
        truth = np.sign(np.diag(W.T @ M @ Z))
        result = sign_search(W, Z, X, Y, 99, rng)
        wins += np.array_equal(result.signs, truth)
    assert wins >= 19


def test_symmetric_gaussian_leaves_flips_indistinguishable():
    rng = np.random.default_rng(3)
    cov = np.diag([9.0, 4.0, 1.0])
    S = rng.multivariate_normal(np.zeros(3), cov, 400).T
    Y = rng.multivariate_normal(np.zeros(3), cov, 400).T
    result = sign_search(np.eye(3), np.eye(3), S, Y, 99, rng)
    assert np.count_nonzero(result.pvalues > 0.05) >= 6


def test_sign_search_is_deterministic():
    rng = np.random.default_rng(0)
    S, Y = _skewed(rng, 300), _skewed(rng, 300)
    first = sign_search(np.eye(3), np.eye(3), S, Y, 99, np.random.default_rng(9))
    second = sign_search(np.eye(3), np.eye(3), S, Y, 99, np.random.default_rng(9))
    np.testing.assert_array_equal(first.pvalues, second.pvalues)
    np.testing.assert_array_equal(first.signs, second.signs)


def test_sign_search_budget(rng):
    n = 21
    with pytest.raises(BudgetError):
        sign_search(np.eye(n), np.eye(n), rng.standard_normal((n, 5)), rng.standard_normal((n, 5)))


def test_identity_perturbation_self_sample(rng):
    X = _skewed(rng, 900)
    result = pca_attack_orthogonal(X, X, 99, rng)
    np.testing.assert_allclose(result.estimator, np.eye(3), atol=1e-9)
    np.testing.assert_allclose(result.estimates, X, atol=1e-8)
    assert result.pvalue == 1.0


def test_large_sample_recovers_rotation(rng):
    X = _skewed(rng, 20000)
    S = _skewed(rng, 1_000_000)
    M = haar_orthogonal(3, rng)
    result = pca_attack_orthogonal(S, M @ X, 99, rng)
    assert np.max(np.abs(result.estimator - M)) <= 0.05
    np.testing.assert_allclose(result.estimator.T @ result.estimator, np.eye(3), atol=1e-9)
    assert 0 <= result.record < 20000


def test_estimator_is_built_from_winning_signs(rng):
    S = _skewed(rng, 200)
    Y = haar_orthogonal(3, rng) @ _skewed(rng, 500)
    M_hat, search, diag = estimate_rotation(S, Y, 49, rng)
    Z = eigen_sorted(sample_covariance(S)).vectors
    W = eigen_sorted(sample_covariance(Y)).vectors
    np.testing.assert_allclose(M_hat, W @ np.diag(search.signs) @ Z.T, atol=1e-12)
    np.testing.assert_allclose(M_hat.T @ M_hat, np.eye(3), atol=1e-9)
    assert search.signs_table.shape == (8, 3)
    assert search.pvalue == search.pvalues.max()
    assert diag.sample_eigen_ratio > 1.0


def test_degenerate_gaps_warn_but_attack_runs(rng):
    # the four points +-e1, +-e2 have an isotropic covariance
    S = np.hstack([np.eye(2), -np.eye(2)])
    Y = S[:, [2, 0, 3, 1]]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = pca_attack_orthogonal(S, Y, 9, rng)
    assert any(issubclass(w.category, EigenGapWarning) for w in caught)
    assert result.diagnostics.warnings


def test_pair_differences(rng):
    D = np.arange(10.0).reshape(2, 5)
    out = pair_differences(D, rng)
    assert out.shape == (2, 2)
    even = pair_differences(np.arange(8.0).reshape(2, 4), rng)
    np.testing.assert_array_equal(even, [[-2.0, -2.0], [-2.0, -2.0]])


def test_general_attack_recovers_rotation_up_to_signs(rng):
    X = _skewed(rng, 4000)
    M = haar_orthogonal(3, rng)
    S = _skewed(rng, 200000)
    result = pca_attack_general(S, M @ X, 99, rng)
    # pair differences are symmetric, so only M D for a sign matrix D in the eigenbasis is identifiable
    Z = eigen_sorted(sample_covariance(S)).vectors
    best = min(np.max(np.abs(result.estimator - M @ Z @ np.diag(d) @ Z.T)) for d in all_sign_vectors(3))
    assert best <= 0.05


def test_general_attack_estimates_translation(rng):
    X = _skewed(rng, 5000)
    M = haar_orthogonal(3, rng)
    v = 50.0 * rng.standard_normal(3)
    S = _skewed(rng, 200000)
    result = pca_attack_general(S, M @ X + v[:, None], 99, rng)
    # v_hat = mean(Y) - M_hat mean(S) by construction
    np.testing.assert_allclose(
        result.translation, (M @ X + v[:, None]).mean(axis=1) - result.estimator @ S.mean(axis=1), atol=1e-9
    )
    np.testing.assert_allclose(result.estimates, result.estimator.T @ (M @ X + (v - result.translation)[:, None]), atol=1e-8)


def test_general_attack_needs_four_records(rng):
    with pytest.raises(InsufficientDataError):
        pca_attack_general(rng.standard_normal((2, 3)), rng.standard_normal((2, 10)))
