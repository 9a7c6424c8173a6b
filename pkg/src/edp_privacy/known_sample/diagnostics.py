"""Distribution properties that predict how well the PCA attack can do."""

from __future__ import annotations

import itertools

import numpy as np

from ..errors import InputError
from ..linalg import eigen_sorted


def _symmetric(Sigma):
    Sigma = np.asarray(Sigma, dtype=float)
    if Sigma.ndim != 2 or Sigma.shape[0] != Sigma.shape[1] or Sigma.shape[0] < 1:
        raise InputError(f"expected a square matrix, got shape {Sigma.shape}")
    if not np.all(np.isfinite(Sigma)):
        raise InputError("matrix contains non-finite entries")
    return Sigma


def min_eigen_ratio(Sigma):
    """Smallest ratio ``lambda_i / lambda_{i+1}`` of consecutive descending eigenvalues.

    Consecutive pairs attain the minimum over all ordered pairs.  A 1 x 1
    matrix has no pair and gives ``inf``.
    """
    Sigma = _symmetric(Sigma)
    values = np.sort(np.linalg.eigvalsh(0.5 * (Sigma + Sigma.T)))[::-1]
    if values[-1] <= 0:
        raise InputError("minimum eigen-ratio needs a positive definite matrix")
    if values.size < 2:
        return float("inf")
    return float(np.min(values[:-1] / values[1:]))


def sym_kl_gaussian(mu_g, mu_h, Sigma, cond_limit=1e12):
    """Symmetric KL divergence of two Gaussians sharing covariance ``Sigma``: ``d' Sigma^-1 d``."""
    Sigma = _symmetric(Sigma)
    d = np.asarray(mu_g, dtype=float).reshape(-1) - np.asarray(mu_h, dtype=float).reshape(-1)
    if d.size != Sigma.shape[0]:
        raise InputError("mean vectors and covariance disagree in dimension")
    if not np.isfinite(np.linalg.cond(Sigma)) or np.linalg.cond(Sigma) > cond_limit:
        raise InputError("covariance is singular")
    return float(d @ np.linalg.solve(Sigma, d))


def invariance_gaussian(mu, alpha, Sigma, distinct_tol=1e-6, max_dim=20):
    """Invariance of a Gaussian with mean ``alpha * mu`` and covariance ``Sigma`` under sign flips.

    ``alpha**2 * min_{D != I} mu' Z (D - I) Lambda^-1 (D - I) Z' mu`` over
    diagonal sign matrices ``D``, with ``Z, Lambda`` the eigen-decomposition
    of ``Sigma``.  Zero means some flipped distribution is indistinguishable.
    """
    Sigma = _symmetric(Sigma)
    mu = np.asarray(mu, dtype=float).reshape(-1)
    n = Sigma.shape[0]
    if mu.size != n:
        raise InputError("mean direction and covariance disagree in dimension")
    if alpha < 0:
        raise InputError("alpha must be non-negative")
    if n > max_dim:
        raise InputError(f"sign enumeration over 2^{n} matrices exceeds the cap 2^{max_dim}")
    model = eigen_sorted(Sigma, distinct_tol, warn=False)
    if model.degenerate:
        raise InputError("invariance needs distinct eigenvalues")
    if model.values[-1] <= 0:
        raise InputError("invariance needs an invertible covariance")
    c = model.vectors.T @ mu
    best = np.inf
    for signs in itertools.product((-1.0, 1.0), repeat=n):
        d = np.asarray(signs) - 1.0
        if not d.any():
            continue
        best = min(best, float(np.sum((d * c) ** 2 / model.values)))
    return float(alpha) ** 2 * best
