"""Uniform estimation of the secret rotation from linked pairs, and its breach probability.

Given linked inputs ``Xq`` and outputs ``Yq = M Xq`` the set of orthogonal
matrices consistent with the links is parameterized by the orthogonal group
of the complement dimension ``n - k``::

    L(P) = (M U_k) U_k' + V_perp P U_perp'

where ``U_k``/``U_perp`` span ``Col(Xq)`` and its complement and ``V_perp``
spans the complement of ``Col(Yq)``.  ``M U_k`` is computable without ``M``.
A Haar-uniform ``P`` therefore yields a uniform estimate.

For an unlinked column ``y`` the estimate ``M_hat' y`` lands uniformly on a
sphere of radius ``r = ||V_perp' y||`` (in the ``n - k`` dimensional
complement) around the truth's projection, so the breach probability is
the fraction of that sphere within distance ``c = eps ||y||`` of a point on
it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InfeasibleAttackError, InputError
from ..linalg import as_rng, haar_orthogonal, orthonormal_basis

SQRT_PI = math.sqrt(math.pi)


def gamma_ratio(m):
    """``Gamma((m + 2) / 2) / Gamma((m + 1) / 2)`` by the two-step recursion."""
    if int(m) != m or m < 1:
        raise InputError("gamma_ratio needs an integer m >= 1")
    m = int(m)
    k, value = (1, SQRT_PI / 2.0) if m % 2 else (2, 2.0 / SQRT_PI)
    while k < m:
        k += 2
        value *= k / (k - 1)
    return value


def sine_integral(z, m):
    """``integral_0^{arccos z} sin(t)^(m - 1) dt`` for ``0 <= z <= 1``, by recursion on ``m``."""
    if int(m) != m or m < 1:
        raise InputError("sine_integral needs an integer m >= 1")
    z = float(z)
    if not 0.0 <= z <= 1.0:
        raise InputError(f"sine_integral needs 0 <= z <= 1, got {z}")
    m = int(m)
    s2 = 1.0 - z * z
    k, value = (1, math.acos(z)) if m % 2 else (2, 1.0 - z)
    while k < m:
        k += 2
        value = (k - 2) / (k - 1) * value - z * s2 ** ((k - 2) / 2) / (k - 1)
    return value


def cap_fraction(c, r, dim):
    """Fraction of the sphere of radius ``r`` in ``R^dim`` lying within distance ``c`` of a given point on it.

    ``dim == 0`` counts as 1; on the two-point sphere ``dim == 1`` the
    fraction is 0.5 unless ``c`` reaches the antipode.
    """
    if dim < 0 or int(dim) != dim:
        raise InputError("dimension must be a non-negative integer")
    if c < 0 or r < 0:
        raise InputError("cap radius and sphere radius must be non-negative")
    dim = int(dim)
    if dim == 0 or c >= 2.0 * r:
        return 1.0
    if dim == 1:
        return 0.5
    t = (c / (r * math.sqrt(2.0))) ** 2
    far = t > 1.0
    w = min(max(t - 1.0 if far else 1.0 - t, 0.0), 1.0)
    if dim == 2:
        part = math.acos(w) / math.pi
    else:
        # Zone area is the (dim-2)-sphere measure integrated over arc length,
        # hence sin^(dim-2): SI(., dim - 1).
        part = (dim - 1) * gamma_ratio(dim) / (dim * SQRT_PI) * sine_integral(w, dim - 1)
    value = 1.0 - part if far else part
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class BreachProbabilityInputs:
    """What the attacker knows about one unlinked output column."""

    y_norm: float
    vperp_ynorm: float
    eps: float
    codim: int

    def __post_init__(self):
        if self.y_norm < 0 or self.vperp_ynorm < 0 or self.eps < 0 or self.codim < 0:
            raise InputError("breach-probability inputs must be non-negative")
        if self.vperp_ynorm > self.y_norm * (1 + 1e-9) + 1e-9:
            raise InputError("complement component cannot exceed the column norm")


def breach_probability(inputs):
    """Probability that the uniform estimate of this column is an eps-breach."""
    return cap_fraction(inputs.y_norm * inputs.eps, min(inputs.vperp_ynorm, inputs.y_norm), inputs.codim)


@dataclass(frozen=True)
class ConstraintSetSampler:
    """Everything needed to draw uniformly from the orthogonal matrices mapping ``Xq`` to ``Yq``."""

    basis: np.ndarray  # U_k
    complement: np.ndarray  # U_perp
    out_complement: np.ndarray  # V_perp
    image_basis: np.ndarray  # M_T U_k

    @property
    def n(self):
        return self.basis.shape[0]

    @property
    def rank(self):
        return self.basis.shape[1]

    @property
    def codim(self):
        return self.complement.shape[1]

    def embed(self, P):
        """``L(P)``."""
        P = np.asarray(P, dtype=float).reshape(self.codim, self.codim)
        fixed = self.image_basis @ self.basis.T
        if self.codim == 0:
            return fixed
        return fixed + self.out_complement @ P @ self.complement.T

    def coordinates(self, M):
        """``L^{-1}(M) = V_perp' M U_perp``."""
        return self.out_complement.T @ np.asarray(M, dtype=float) @ self.complement

    def draw(self, rng=None):
        """Return ``(M_hat, P)`` with ``P`` Haar on the complement group."""
        P = haar_orthogonal(self.codim, as_rng(rng))
        return self.embed(P), P

    def complement_norms(self, Y):
        """``||V_perp' y_j||`` for every column of ``Y``."""
        return np.linalg.norm(self.out_complement.T @ np.asarray(Y, dtype=float), axis=0)


def constraint_set_sampler(Xq, Yq, rank_tol=1e-9, feasibility_tol=1e-6):
    """Build the sampler for ``{M orthogonal : M Xq = Yq}``.

    Raises :class:`InfeasibleAttackError` if no orthogonal matrix maps
    ``Xq`` onto ``Yq`` (within ``feasibility_tol``, relative).
    """
    Xq = np.asarray(Xq, dtype=float)
    Yq = np.asarray(Yq, dtype=float)
    if Xq.ndim == 1:
        Xq, Yq = Xq[:, None], Yq.reshape(-1, 1)
    if Xq.shape != Yq.shape:
        raise InputError(f"linked inputs {Xq.shape} and outputs {Yq.shape} differ in shape")
    n = Xq.shape[0]
    xs = orthonormal_basis(Xq, rank_tol)
    k = xs.rank
    if k == 0:
        raise InfeasibleAttackError("linked inputs span nothing")
    A, *_ = np.linalg.lstsq(Xq, xs.basis, rcond=None)
    image_basis = Yq @ A
    U, s, _ = np.linalg.svd(Yq, full_matrices=True)
    scale = max(float(np.max(np.abs(Yq))), 1e-300)
    if np.max(np.abs(image_basis.T @ image_basis - np.eye(k))) > feasibility_tol:
        raise InfeasibleAttackError("linked pairs are not related by an orthogonal map")
    if np.max(np.abs(image_basis @ (xs.basis.T @ Xq) - Yq)) > feasibility_tol * scale:
        raise InfeasibleAttackError("linked pairs are not related by an orthogonal map")
    if s.size > k and s[k] > feasibility_tol * s[0]:
        raise InfeasibleAttackError("linked outputs span more dimensions than the linked inputs")
    out_complement = U[:, k:] if n > k else np.zeros((n, 0))
    return ConstraintSetSampler(xs.basis, xs.complement, out_complement, image_basis)


def sample_uniform_estimator(sampler, rng=None):
    """Uniform draw ``M_hat`` from the constraint set."""
    return sampler.draw(rng)[0]
