"""PCA-based known-sample attack.

The covariance of ``M x`` is ``M Sigma M'``, so its eigenvectors are the
rotated eigenvectors of ``Sigma`` up to sign.  Matching the eigenvectors
``Z`` of a sample ``S`` with the eigenvectors ``W`` of the released data
gives ``M = W D Z'`` for some diagonal sign matrix ``D``; the sign matrix is
chosen by how well ``W D Z' S`` matches ``Y`` in distribution.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import BudgetError, InputError, InsufficientDataError
from ..linalg import EigenGapWarning, as_rng, eigen_sorted, sample_covariance
from .diagnostics import min_eigen_ratio
from .energy import (
    DEFAULT_MAX_POOLED,
    DEFAULT_PERMUTATIONS,
    PooledEnergy,
    permutation_labels,
    pvalue_from_statistics,
    subsample_sizes,
)

DEFAULT_MAX_SIGN_DIM = 20


def all_sign_vectors(n):
    """All ``2**n`` vectors in ``{-1, +1}^n`` in lexicographic order."""
    return np.array(list(itertools.product((-1.0, 1.0), repeat=n))).reshape(-1, n)


@dataclass(frozen=True)
class SignSearchResult:
    """Winning signs plus the full table (row ``i`` of ``signs_table`` scored ``pvalues[i]``)."""

    signs: np.ndarray
    pvalue: float
    statistic: float
    signs_table: np.ndarray
    pvalues: np.ndarray
    statistics: np.ndarray

    @property
    def index(self):
        return int(np.flatnonzero(np.all(self.signs_table == self.signs, axis=1))[0])


def sign_search(
    W,
    Z,
    S,
    Y,
    permutations=DEFAULT_PERMUTATIONS,
    rng=None,
    max_pooled=DEFAULT_MAX_POOLED,
    max_dim=DEFAULT_MAX_SIGN_DIM,
):
    """Score every sign matrix ``D`` by the two-sample p-value of ``(W D Z' S, Y)``.

    Every candidate is tested on the same subsample and the same label
    permutations, so the p-values are directly comparable.  The winner has
    the largest p-value; ties go to the smaller observed statistic and then
    to the lexicographically smallest sign vector.
    """
    W = np.asarray(W, dtype=float)
    Z = np.asarray(Z, dtype=float)
    S = np.asarray(S, dtype=float)
    Y = np.asarray(Y, dtype=float)
    n = W.shape[0]
    if W.shape != (n, n) or Z.shape != (n, n) or S.shape[0] != n or Y.shape[0] != n:
        raise InputError("eigenvector matrices and samples disagree in dimension")
    if n > max_dim:
        raise BudgetError(f"exhaustive sign search over 2^{n} candidates exceeds the cap 2^{max_dim}")
    if S.shape[1] < 2 or Y.shape[1] < 2:
        raise InsufficientDataError("sign search needs at least two sample and two released records")
    rng = as_rng(rng)
    p, r = subsample_sizes(S.shape[1], Y.shape[1], max_pooled)
    if p < S.shape[1]:
        S = S[:, rng.choice(S.shape[1], p, replace=False)]
    if r < Y.shape[1]:
        Y = Y[:, rng.choice(Y.shape[1], r, replace=False)]
    labels = permutation_labels(p, r, permutations, rng)
    pooled = PooledEnergy(cdist(S.T, S.T), cdist(Y.T, Y.T), labels)
    ZS = Z.T @ S
    table = all_sign_vectors(n)
    pvals = np.empty(len(table))
    stats = np.empty(len(table))
    for i, d in enumerate(table):
        TS = W @ (d[:, None] * ZS)
        perm_stats = pooled.statistics(cdist(TS.T, Y.T))
        stats[i] = perm_stats[0]
        pvals[i] = pvalue_from_statistics(perm_stats)
    # lexsort: last key is primary.  Sorting is stable so equal keys keep table order.
    best = int(np.lexsort((stats, -pvals))[0])
    return SignSearchResult(table[best].copy(), float(pvals[best]), float(stats[best]), table, pvals, stats)


@dataclass
class PcaDiagnostics:
    sample_eigen_ratio: float
    data_eigen_ratio: float
    sample_min_gap: float
    data_min_gap: float
    warnings: list = field(default_factory=list)


@dataclass
class PcaAttackResult:
    """Estimated rotation, winning signs and the recovered records (columns of ``estimates``).

    ``translation`` is the estimated ``v`` (zero for the orthogonal attack)
    and ``record`` the randomly chosen headline column.
    """

    estimator: np.ndarray
    signs: np.ndarray
    pvalue: float
    estimates: np.ndarray
    record: int
    translation: np.ndarray
    search: SignSearchResult
    diagnostics: PcaDiagnostics

    @property
    def headline_estimate(self):
        return self.estimates[:, self.record]


def _safe_ratio(values):
    try:
        return min_eigen_ratio(np.diag(values))
    except InputError:
        return float("nan")


def estimate_rotation(
    S,
    Y,
    permutations=DEFAULT_PERMUTATIONS,
    rng=None,
    max_pooled=DEFAULT_MAX_POOLED,
    max_dim=DEFAULT_MAX_SIGN_DIM,
    distinct_tol=1e-6,
):
    """``(M_hat, search, diagnostics)`` from the sample ``S`` and released data ``Y``."""
    S = np.asarray(S, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if S.ndim != 2 or Y.ndim != 2 or S.shape[0] != Y.shape[0]:
        raise InputError(f"sample {S.shape} and released data {Y.shape} must share the attribute count")
    if not (np.all(np.isfinite(S)) and np.all(np.isfinite(Y))):
        raise InputError("non-finite entries in sample or released data")
    if S.shape[1] < 2 or Y.shape[1] < 2:
        raise InsufficientDataError("the PCA attack needs at least two sample and two released records")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sample_model = eigen_sorted(sample_covariance(S), distinct_tol)
        data_model = eigen_sorted(sample_covariance(Y), distinct_tol)
    notes = [str(w.message) for w in caught if issubclass(w.category, EigenGapWarning)]
    for w in caught:
        warnings.warn(w.message, stacklevel=3)
    search = sign_search(data_model.vectors, sample_model.vectors, S, Y, permutations, rng, max_pooled, max_dim)
    M_hat = data_model.vectors @ (search.signs[:, None] * sample_model.vectors.T)
    diagnostics = PcaDiagnostics(
        _safe_ratio(sample_model.values),
        _safe_ratio(data_model.values),
        sample_model.min_gap,
        data_model.min_gap,
        notes,
    )
    return M_hat, search, diagnostics


def pca_attack_orthogonal(
    S, Y, permutations=DEFAULT_PERMUTATIONS, rng=None, max_pooled=DEFAULT_MAX_POOLED, max_dim=DEFAULT_MAX_SIGN_DIM
):
    """Estimate every record of ``Y = M X`` (columns permuted) from an independent sample ``S``."""
    rng = as_rng(rng)
    M_hat, search, diagnostics = estimate_rotation(S, Y, permutations, rng, max_pooled, max_dim)
    Y = np.asarray(Y, dtype=float)
    record = int(rng.integers(Y.shape[1]))
    return PcaAttackResult(
        M_hat, search.signs, search.pvalue, M_hat.T @ Y, record, np.zeros(Y.shape[0]), search, diagnostics
    )


def pair_differences(D, rng):
    """Columns ``d_i - d_{h+i}`` for ``h = m // 2``, after dropping one random column when ``m`` is odd."""
    m = D.shape[1]
    if m % 2:
        keep = np.delete(np.arange(m), rng.integers(m))
        D = D[:, keep]
        m -= 1
    h = m // 2
    return D[:, :h] - D[:, h:]


def pca_attack_general(
    S, Y, permutations=DEFAULT_PERMUTATIONS, rng=None, max_pooled=DEFAULT_MAX_POOLED, max_dim=DEFAULT_MAX_SIGN_DIM
):
    """Estimate records of ``Y = M X + v`` from an independent sample ``S``.

    Differences of disjoint record pairs cancel ``v``; the rotation is
    estimated from them, then ``v`` from the sample means:
    ``x_hat = M_hat' (y - (mean(Y) - M_hat mean(S)))``.
    """
    S = np.asarray(S, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if S.ndim != 2 or Y.ndim != 2:
        raise InputError("sample and released data must be 2-D")
    if S.shape[1] < 4 or Y.shape[1] < 4:
        raise InsufficientDataError(
            "the translation-aware PCA attack needs at least four sample and four released records"
        )
    rng = as_rng(rng)
    S_diff = pair_differences(S, rng)
    Y_diff = pair_differences(Y, rng)
    M_hat, search, diagnostics = estimate_rotation(S_diff, Y_diff, permutations, rng, max_pooled, max_dim)
    v_hat = Y.mean(axis=1) - M_hat @ S.mean(axis=1)
    estimates = M_hat.T @ (Y - v_hat[:, None])
    record = int(rng.integers(Y.shape[1]))
    return PcaAttackResult(M_hat, search.signs, search.pvalue, estimates, record, v_hat, search, diagnostics)
