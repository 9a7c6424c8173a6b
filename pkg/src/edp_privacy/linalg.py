"""Numerical kernels shared by both attacks.

Records are columns throughout: a data matrix is ``n x m`` with ``n``
attributes and ``m`` records.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InputError, InsufficientDataError

SIGN_ZERO_TOL = 1e-12


class EigenGapWarning(UserWarning):
    """Eigenvalues are not distinct enough for reliable eigenvector matching."""

    def __init__(self, min_gap, tol):
        super().__init__(
            f"minimum relative eigen-gap {min_gap:.3g} is below {tol:.3g}; "
            "eigenvector order/orientation is unreliable"
        )
        self.min_gap = min_gap
        self.tol = tol


def as_rng(rng):
    """Coerce ``None``, an int seed or a Generator into a ``numpy.random.Generator``."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def check_data_matrix(X, name="X", allow_zero_records=False):
    """Validate a 2-D finite array with at least one row and column.

    Returns the array as float64.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise InputError(f"{name} must be 2-D (attributes x records), got shape {X.shape}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise InputError(f"{name} must have at least one attribute and one record")
    if not np.all(np.isfinite(X)):
        raise InputError(f"{name} contains non-finite entries")
    if not allow_zero_records:
        zero = np.flatnonzero(~np.any(X != 0.0, axis=0))
        if zero.size:
            raise InputError(f"{name} has all-zero record(s) at column(s) {zero[:5].tolist()}")
    return X


@dataclass(frozen=True)
class OrthonormalBasisPair:
    """Orthonormal bases of a column space and of its orthogonal complement."""

    basis: np.ndarray
    complement: np.ndarray

    @property
    def rank(self):
        return self.basis.shape[1]

    @property
    def codim(self):
        return self.complement.shape[1]

    @property
    def full(self):
        """The square orthogonal matrix ``[basis | complement]``."""
        return np.hstack([self.basis, self.complement])


def orthonormal_basis(M, rank_tol=1e-9):
    """Orthonormal basis of ``Col(M)`` plus a basis of its complement.

    Numerical rank counts singular values above ``rank_tol`` times the
    largest one.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    if M.ndim != 2 or M.shape[0] < 1:
        raise InputError(f"expected an n x q matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InputError("matrix contains non-finite entries")
    n = M.shape[0]
    if M.shape[1] == 0:
        return OrthonormalBasisPair(np.zeros((n, 0)), np.eye(n))
    U, s, _ = np.linalg.svd(M, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        k = 0
    else:
        k = int(np.count_nonzero(s > rank_tol * s[0]))
    return OrthonormalBasisPair(U[:, :k].copy(), U[:, k:].copy())


def haar_orthogonal(dim, rng=None):
    """Draw a matrix from the Haar (uniform) distribution on the orthogonal group.

    QR of a standard normal matrix, with each column's sign fixed by the
    corresponding diagonal entry of R so that the law is exactly Haar.
    ``dim == 0`` gives the empty ``0 x 0`` matrix.
    """
    if dim < 0:
        raise InputError("dimension must be non-negative")
    if dim == 0:
        return np.zeros((0, 0))
    rng = as_rng(rng)
    G = rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(G)
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    return Q * d


def sample_covariance(D):
    """Unbiased (divisor ``m - 1``) covariance of the columns of ``D``."""
    D = np.asarray(D, dtype=float)
    if D.ndim != 2:
        raise InputError(f"expected a 2-D data matrix, got shape {D.shape}")
    if D.shape[1] < 2:
        raise InsufficientDataError("sample covariance needs at least two records")
    centered = D - D.mean(axis=1, keepdims=True)
    C = centered @ centered.T / (D.shape[1] - 1)
    return 0.5 * (C + C.T)


def canonical_signs(V, zero_tol=SIGN_ZERO_TOL):
    """Flip each column so its first entry exceeding ``zero_tol`` in magnitude is positive.

    This picks the lexicographically larger of ``{v, -v}``.
    """
    V = np.array(V, dtype=float, copy=True)
    for i in range(V.shape[1]):
        col = V[:, i]
        nz = np.flatnonzero(np.abs(col) > zero_tol)
        if nz.size and col[nz[0]] < 0:
            V[:, i] = -col
    return V


@dataclass(frozen=True)
class EigenModel:
    """Descending eigenvalues with sign-canonical orthonormal eigenvectors (as columns)."""

    values: np.ndarray
    vectors: np.ndarray
    min_gap: float
    distinct_tol: float

    @property
    def degenerate(self):
        return self.min_gap < self.distinct_tol


def relative_min_gap(values):
    """Smallest gap between consecutive descending eigenvalues, relative to the largest magnitude."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float("inf")
    scale = np.max(np.abs(values))
    if scale == 0.0:
        return 0.0
    return float(np.min(values[:-1] - values[1:]) / scale)


def eigen_sorted(S, distinct_tol=1e-6, warn=True):
    """Eigendecomposition of a symmetric matrix, sorted by descending eigenvalue.

    Eigenvectors are sign-canonicalized with :func:`canonical_signs`.  When
    two eigenvalues are closer than ``distinct_tol`` (relative), the result
    is flagged ``degenerate`` and an :class:`EigenGapWarning` is emitted.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise InputError(f"expected a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise InputError("matrix contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(S)))) if S.size else 1.0
    if S.size and np.max(np.abs(S - S.T)) > 1e-10 * scale:
        raise InputError("matrix is not symmetric")
    vals, vecs = np.linalg.eigh(0.5 * (S + S.T))
    order = np.argsort(vals, kind="stable")[::-1]
    vals = vals[order]
    vecs = canonical_signs(vecs[:, order])
    gap = relative_min_gap(vals)
    model = EigenModel(vals, vecs, gap, distinct_tol)
    if warn and model.degenerate:
        warnings.warn(EigenGapWarning(gap, distinct_tol), stacklevel=2)
    return model
