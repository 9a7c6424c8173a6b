"""The data owner's side: secret rigid motions and the released dataset."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .linalg import as_rng, check_data_matrix, haar_orthogonal


@dataclass(frozen=True)
class RigidMotion:
    """``x -> M x + v`` with ``M`` orthogonal."""

    matrix: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        v = np.asarray(self.translation, dtype=float).reshape(-1)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or v.shape[0] != M.shape[0]:
            raise InputError("rigid motion needs a square matrix and a matching translation")
        if np.max(np.abs(M.T @ M - np.eye(M.shape[0]))) > 1e-8:
            raise InputError("rigid motion matrix is not orthogonal")
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "translation", v)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def is_orthogonal(self):
        return not np.any(self.translation)

    def apply(self, X):
        return self.matrix @ X + self.translation[:, None]

    def invert(self, Y):
        return self.matrix.T @ (Y - self.translation[:, None])


@dataclass(frozen=True)
class RecordPermutation:
    """Bijection on record indices; record ``i`` is released as column ``images[i]``."""

    images: np.ndarray

    def __post_init__(self):
        images = np.asarray(self.images, dtype=np.intp).reshape(-1)
        if not np.array_equal(np.sort(images), np.arange(images.size)):
            raise InputError("record permutation must be a bijection on 0..m-1")
        object.__setattr__(self, "images", images)

    @property
    def size(self):
        return self.images.size

    def inverse(self):
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(self.images.size)
        return RecordPermutation(inv)

    @classmethod
    def identity(cls, m):
        return cls(np.arange(m))

    @classmethod
    def random(cls, m, rng=None):
        return cls(as_rng(rng).permutation(m))


def default_translation_scale(X):
    """Ten times the mean record norm: large enough to separate translation from rotation."""
    X = np.asarray(X, dtype=float)
    return 10.0 * float(np.mean(np.linalg.norm(X, axis=0)))


def generate_rigid_motion(n, with_translation=False, translation_scale=1.0, rng=None):
    """Draw a Haar-uniform orthogonal matrix and, optionally, a Gaussian translation.

    Translation entries are i.i.d. ``N(0, translation_scale**2)``.
    """
    if n < 1:
        raise InputError("dimension must be at least 1")
    if translation_scale < 0:
        raise InputError("translation_scale must be non-negative")
    rng = as_rng(rng)
    M = haar_orthogonal(n, rng)
    if with_translation:
        v = translation_scale * rng.standard_normal(n)
    else:
        v = np.zeros(n)
    return RigidMotion(M, v)


def perturb(X, motion, perm=None):
    """Release ``Y`` with column ``perm.images[i]`` equal to ``M x_i + v``."""
    X = check_data_matrix(X)
    n, m = X.shape
    if motion.dim != n:
        raise InputError(f"motion acts on dimension {motion.dim}, data has {n} attributes")
    if perm is None:
        perm = RecordPermutation.identity(m)
    if perm.size != m:
        raise InputError(f"permutation has size {perm.size}, data has {m} records")
    Y = np.empty_like(X)
    Y[:, perm.images] = motion.apply(X)
    return Y


def unperturb(Y, motion, perm=None):
    """Invert :func:`perturb` given the secret."""
    Y = np.asarray(Y, dtype=float)
    if perm is None:
        perm = RecordPermutation.identity(Y.shape[1])
    return motion.invert(Y[:, perm.images])
