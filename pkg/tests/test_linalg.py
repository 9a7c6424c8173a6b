import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import null_space

from edp_privacy.errors import InputError, InsufficientDataError
from edp_privacy.linalg import (
    EigenGapWarning,
    canonical_signs,
    check_data_matrix,
    eigen_sorted,
    haar_orthogonal,
    orthonormal_basis,
    sample_covariance,
)


def test_basis_of_identity_is_full_rank():
    pair = orthonormal_basis(np.eye(3))
    assert pair.rank == 3
    assert pair.complement.shape == (3, 0)


def test_basis_of_parallel_columns():
    pair = orthonormal_basis(np.array([[1.0, 2.0], [0, 0], [0, 0]]))
    assert pair.rank == 1
    assert np.allclose(np.abs(pair.basis[:, 0]), [1, 0, 0])
    assert np.allclose(pair.complement[0], 0)
    assert pair.codim == 2


def test_basis_rank_matches_row_reduction(rng):
    A = rng.standard_normal((6, 3))
    M = np.column_stack([A, A[:, 0] + A[:, 1]])
    pair = orthonormal_basis(M)
    # Independent oracle: dimension of the null space of M' from scipy.
    assert pair.rank == 6 - null_space(M.T).shape[1] == 3


def test_basis_rejects_non_finite():
    with pytest.raises(InputError):
        orthonormal_basis(np.array([[1.0, np.nan], [0.0, 1.0]]))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 8), q=st.integers(1, 8), seed=st.integers(0, 10_000))
def test_basis_pair_is_orthogonal_partition(n, q, seed):
    M = np.random.default_rng(seed).standard_normal((n, q))
    pair = orthonormal_basis(M)
    full = pair.full
    assert full.shape == (n, n)
    assert np.max(np.abs(full.T @ full - np.eye(n))) < 1e-10
    assert np.max(np.abs(pair.basis.T @ pair.complement)) < 1e-10 if pair.codim and pair.rank else True
    proj = pair.basis @ pair.basis.T + pair.complement @ pair.complement.T
    assert np.max(np.abs(proj - np.eye(n))) < 1e-9
    # Col(U_k) = Col(M): projecting M onto the basis loses nothing.
    assert np.allclose(pair.basis @ (pair.basis.T @ M), M, atol=1e-9)


def test_haar_dim_zero_is_empty():
    assert haar_orthogonal(0).shape == (0, 0)


def test_haar_dim_one_is_fair_coin():
    rng = np.random.default_rng(0)
    draws = np.array([haar_orthogonal(1, rng)[0, 0] for _ in range(10_000)])
    assert set(np.unique(draws)) == {-1.0, 1.0}
    assert abs(np.mean(draws == 1.0) - 0.5) <= 0.02


@pytest.mark.parametrize("seed", range(5))
def test_haar_is_orthogonal(seed):
    P = haar_orthogonal(5, seed)
    assert np.max(np.abs(P.T @ P - np.eye(5))) <= 1e-10


def test_haar_left_invariance_trace_moments():
    rng = np.random.default_rng(7)
    Q = haar_orthogonal(4, rng)
    draws = [haar_orthogonal(4, rng) for _ in range(10_000)]
    t1 = np.array([np.trace(P) for P in draws])
    t2 = np.array([np.trace(Q @ P) for P in draws])
    for k in (1, 2, 3):
        a, b = t1**k, t2**k
        se = np.sqrt(a.var() / a.size + b.var() / b.size)
        assert abs(a.mean() - b.mean()) <= 3 * se + 1e-12


def test_haar_trace_moments_match_theory():
    # For Haar O(n), n >= 2: E tr P = 0 and E (tr P)^2 = 1.
    rng = np.random.default_rng(3)
    t = np.array([np.trace(haar_orthogonal(5, rng)) for _ in range(20_000)])
    assert abs(t.mean()) < 3 * t.std() / np.sqrt(t.size)
    assert abs((t**2).mean() - 1.0) < 0.05


def test_sample_covariance_hand_example():
    C = sample_covariance(np.array([[0.0, 2.0], [0.0, 0.0]]))
    assert np.allclose(C, [[2, 0], [0, 0]])


def test_sample_covariance_constant_columns():
    assert np.allclose(sample_covariance(np.ones((3, 5))), 0)


def test_sample_covariance_needs_two_records():
    with pytest.raises(InsufficientDataError):
        sample_covariance(np.ones((3, 1)))


def test_sample_covariance_converges():
    rng = np.random.default_rng(1)
    target = np.diag([0.1, 2.0, 40.0])
    D = rng.multivariate_normal(np.zeros(3), target, 100_000).T
    C = sample_covariance(D)
    assert np.allclose(np.diag(C), np.diag(target), rtol=0.05)
    assert np.max(np.abs(C - C.T)) == 0
    assert np.linalg.eigvalsh(C).min() > -1e-10


def test_eigen_sorted_diagonal():
    model = eigen_sorted(np.diag([1.0, 2.0, 3.0]))
    assert np.allclose(model.values, [3, 2, 1])
    assert np.allclose(model.vectors, np.eye(3)[:, [2, 1, 0]])


def test_eigen_sorted_identity_is_degenerate():
    with pytest.warns(EigenGapWarning):
        model = eigen_sorted(np.eye(3))
    assert model.degenerate
    assert model.min_gap == 0.0
    assert np.allclose(model.vectors.T @ model.vectors, np.eye(3))


def test_eigen_sorted_recovers_construction(rng):
    Z = haar_orthogonal(3, rng)
    lam = np.array([40.0, 2.0, 0.1])
    S = Z @ np.diag(lam) @ Z.T
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        model = eigen_sorted(S)
    assert np.allclose(model.values, lam, atol=1e-8)
    assert np.allclose(model.vectors, canonical_signs(Z), atol=1e-8)


def test_eigen_sorted_contract(rng):
    A = rng.standard_normal((5, 5))
    S = A @ A.T
    model = eigen_sorted(S)
    V = model.vectors
    assert np.all(np.diff(model.values) <= 0)
    assert np.max(np.abs(V.T @ V - np.eye(5))) < 1e-10
    assert np.max(np.abs(S @ V - V * model.values)) < 1e-8 * np.linalg.norm(S)
    for i in range(5):
        first = V[np.flatnonzero(np.abs(V[:, i]) > 1e-12)[0], i]
        assert first > 0


def test_eigen_sorted_rejects_asymmetric():
    with pytest.raises(InputError):
        eigen_sorted(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_canonical_signs_skips_tiny_leading_entries():
    v = np.array([[1e-14], [-1.0]])
    assert canonical_signs(v)[1, 0] == 1.0


def test_check_data_matrix_rejects_zero_record():
    with pytest.raises(InputError):
        check_data_matrix(np.array([[1.0, 0.0], [2.0, 0.0]]))
