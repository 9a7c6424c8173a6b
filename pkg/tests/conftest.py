import itertools

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def haar_batch(dim, count, rng):
    """Independent Haar draws via batched QR with the diagonal sign fix (test oracle)."""
    G = rng.standard_normal((count, dim, dim))
    Q, R = np.linalg.qr(G)
    d = np.sign(np.diagonal(R, axis1=1, axis2=2))
    d[d == 0] = 1.0
    return Q * d[:, None, :]


def brute_force_valid(Xa, Y, I, tol=1e-6, lengths_preserved=True):
    """All valid injective maps on ``I`` by exhaustive enumeration."""
    I = list(I)
    m = Y.shape[1]
    out = []
    for images in itertools.permutations(range(m), len(I)):
        ok = True
        for p, (i, j) in enumerate(zip(I, images)):
            if lengths_preserved and not np.isclose(
                np.linalg.norm(Xa[:, i]), np.linalg.norm(Y[:, j]), rtol=tol, atol=1e-9
            ):
                ok = False
                break
            for i2, j2 in zip(I[:p], images[:p]):
                if not np.isclose(
                    np.linalg.norm(Xa[:, i] - Xa[:, i2]), np.linalg.norm(Y[:, j] - Y[:, j2]), rtol=tol, atol=1e-9
                ):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(images)
    return out


def brute_force_maximal(Xa, Y, tol=1e-6, lengths_preserved=True):
    """Largest-first, lexicographic search for a subset with exactly one valid map."""
    a = Xa.shape[1]
    for size in range(a, 0, -1):
        for I in itertools.combinations(range(a), size):
            found = brute_force_valid(Xa, Y, I, tol, lengths_preserved)
            if len(found) == 1:
                return I, found[0]
    return (), ()
