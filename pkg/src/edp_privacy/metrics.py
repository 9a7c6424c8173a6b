"""Privacy-breach criteria: relative Euclidean error, minimum entry difference, cosine."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


def _pair(x, x_hat):
    x = np.asarray(x, dtype=float).reshape(-1)
    x_hat = np.asarray(x_hat, dtype=float).reshape(-1)
    if x.shape != x_hat.shape:
        raise InputError(f"record and estimate differ in length: {x.size} vs {x_hat.size}")
    return x, x_hat


def relative_error(x, x_hat):
    x, x_hat = _pair(x, x_hat)
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise InputError("relative error is undefined for a zero record")
    return float(np.linalg.norm(x_hat - x) / norm)


def nad(a, a_hat):
    """Normalized absolute difference, elementwise: ``|a_hat|`` where ``a == 0``, else ``|a - a_hat| / |a|``."""
    a = np.asarray(a, dtype=float)
    a_hat = np.asarray(a_hat, dtype=float)
    out = np.abs(a_hat).astype(float)
    nz = a != 0
    out[nz] = np.abs(a[nz] - a_hat[nz]) / np.abs(a[nz])
    return out


def min_nad(x, x_hat):
    x, x_hat = _pair(x, x_hat)
    return float(np.min(nad(x, x_hat)))


def cos_gap(x, x_hat):
    """``1 - cos(x, x_hat)``."""
    x, x_hat = _pair(x, x_hat)
    nx, nh = np.linalg.norm(x), np.linalg.norm(x_hat)
    if nx == 0.0 or nh == 0.0:
        raise InputError("cosine is undefined for a zero-norm vector")
    return float(1.0 - (x @ x_hat) / (nx * nh))


def eps_breach(x, x_hat, eps):
    """Return ``(breached, relative_error)``; breached iff ``||x_hat - x|| <= eps ||x||``."""
    err = relative_error(x, x_hat)
    return err <= eps, err


def med_breach(x, x_hat, eps):
    """Return ``(breached, min_nad)``."""
    value = min_nad(x, x_hat)
    return value <= eps, value


def cos_breach(x, x_hat, eps):
    """Return ``(breached, cos_gap)``."""
    value = cos_gap(x, x_hat)
    return value <= eps, value


@dataclass(frozen=True)
class BreachOutcome:
    relative_euclid: float
    min_nad: float
    cos_gap: float
    eps: float

    @property
    def eps_breach(self):
        return self.relative_euclid <= self.eps

    @property
    def med_breach(self):
        return self.min_nad <= self.eps

    @property
    def cos_breach(self):
        return self.cos_gap <= self.eps


def evaluate_breach(x, x_hat, eps):
    return BreachOutcome(relative_error(x, x_hat), min_nad(x, x_hat), cos_gap(x, x_hat), float(eps))


def breach_columns(X, X_hat, eps):
    """Column-wise metrics for aligned ``n x m`` truth and estimates.

    Returns a dict of arrays: ``relative_euclid``, ``min_nad``, ``cos_gap``
    and the three boolean breach flags.
    """
    X = np.asarray(X, dtype=float)
    X_hat = np.asarray(X_hat, dtype=float)
    if X.shape != X_hat.shape:
        raise InputError(f"shape mismatch: {X.shape} vs {X_hat.shape}")
    nx = np.linalg.norm(X, axis=0)
    nh = np.linalg.norm(X_hat, axis=0)
    if np.any(nx == 0) or np.any(nh == 0):
        raise InputError("zero-norm record or estimate")
    rel = np.linalg.norm(X_hat - X, axis=0) / nx
    mn = np.min(nad(X, X_hat), axis=0)
    cg = 1.0 - np.sum(X * X_hat, axis=0) / (nx * nh)
    return {
        "relative_euclid": rel,
        "min_nad": mn,
        "cos_gap": cg,
        "eps_breach": rel <= eps,
        "med_breach": mn <= eps,
        "cos_breach": cg <= eps,
    }
