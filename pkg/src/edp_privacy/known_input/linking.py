"""Linking known private records to their (permuted) perturbed columns.

An assignment maps known-input indices to output columns.  It is *valid* when
every pairwise distance among the chosen inputs matches the distance among
their images and, for a purely orthogonal perturbation, every record length
matches its image's length.  A set of inputs is *uniquely valid* when exactly
one valid assignment exists on it; the attacker wants the largest such set.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ..errors import InputError
from ..linalg import check_data_matrix


@dataclass(frozen=True)
class Assignment:
    """Injective map ``domain[i] -> images[i]`` from known-input to output indices."""

    domain: tuple = ()
    images: tuple = ()

    def __post_init__(self):
        domain = tuple(int(i) for i in self.domain)
        images = tuple(int(j) for j in self.images)
        if len(domain) != len(images):
            raise InputError("assignment domain and images differ in length")
        if len(set(domain)) != len(domain) or len(set(images)) != len(images):
            raise InputError("assignment must be injective over a duplicate-free domain")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "images", images)

    def __len__(self):
        return len(self.domain)

    def as_dict(self):
        return dict(zip(self.domain, self.images))

    @classmethod
    def from_dict(cls, mapping):
        items = sorted(mapping.items())
        return cls(tuple(i for i, _ in items), tuple(j for _, j in items))


@dataclass(frozen=True)
class LinkResult:
    """Outcome of the maximal-uniquely-valid-subset search.

    ``complete`` is False when a time budget stopped the search early; the
    assignment is then empty.
    """

    assignment: Assignment
    complete: bool = True
    subsets_examined: int = 0
    elapsed: float = field(default=0.0, compare=False)

    @property
    def indices(self):
        return self.assignment.domain

    @property
    def images(self):
        return self.assignment.images

    def __len__(self):
        return len(self.assignment)


class LinkingProblem:
    """Known inputs ``Xa`` (n x a) against released data ``Y`` (n x m).

    Distances and lengths are compared with relative tolerance ``tol`` plus
    an absolute floor of ``tol * 1e-3`` times the largest record norm, so
    duplicate records (distance exactly 0 in theory) compare equal.

    With ``collapse_duplicates`` numerically identical output columns are
    interchangeable: only the lowest-index unused member of each duplicate
    group is tried as a candidate, so duplicates in ``X`` do not by
    themselves destroy uniqueness.
    """

    def __init__(self, Xa, Y, tol=1e-6, lengths_preserved=True, collapse_duplicates=True):
        self.Xa = check_data_matrix(Xa, "Xa", allow_zero_records=True)
        self.Y = check_data_matrix(Y, "Y", allow_zero_records=True)
        if self.Xa.shape[0] != self.Y.shape[0]:
            raise InputError("known inputs and released data differ in dimension")
        self.tol = float(tol)
        self.lengths_preserved = bool(lengths_preserved)
        self.collapse_duplicates = bool(collapse_duplicates)
        self.x_norms = np.linalg.norm(self.Xa, axis=0)
        self.y_norms = np.linalg.norm(self.Y, axis=0)
        scale = max(float(self.x_norms.max()), float(self.y_norms.max()), 1e-300)
        self.atol = self.tol * 1e-3 * scale
        diff = self.Xa[:, :, None] - self.Xa[:, None, :]
        self.x_dist = np.sqrt(np.einsum("kij,kij->ij", diff, diff))
        self._dup_keys = None
        if self.collapse_duplicates:
            _, inverse, counts = np.unique(
                np.round(self.Y.T / scale, 9), axis=0, return_inverse=True, return_counts=True
            )
            if np.any(counts > 1):
                self._dup_keys = inverse.reshape(-1)

    @property
    def a(self):
        return self.Xa.shape[1]

    @property
    def m(self):
        return self.Y.shape[1]

    def _close(self, values, target):
        return np.abs(values - target) <= self.tol * np.maximum(np.abs(values), abs(target)) + self.atol

    def candidates(self, domain, images, i_hat, used=None):
        """Output columns that can extend the valid assignment ``domain -> images`` by ``i_hat``."""
        if used is None:
            used = np.zeros(self.m, dtype=bool)
            used[list(images)] = True
        cand = np.flatnonzero(~used)
        if self.lengths_preserved:
            cand = cand[self._close(self.y_norms[cand], self.x_norms[i_hat])]
        for i1, j1 in zip(domain, images):
            if cand.size == 0:
                break
            d = np.linalg.norm(self.Y[:, cand] - self.Y[:, [j1]], axis=0)
            cand = cand[self._close(d, self.x_dist[i1, i_hat])]
        return cand

    def _dedupe(self, cand):
        if self._dup_keys is None or cand.size < 2:
            return cand
        _, first = np.unique(self._dup_keys[cand], return_index=True)
        return cand[np.sort(first)]

    def valid_assignments(self, I, limit=2):
        """Depth-first enumeration of valid assignments on ``I``, stopping after ``limit``."""
        I = sorted(int(i) for i in I)
        if any(i < 0 or i >= self.a for i in I):
            raise InputError("index set refers to a non-existent known input")
        found = []
        used = np.zeros(self.m, dtype=bool)
        images = []

        # Branch on the smallest unassigned index only: every index must be
        # assigned eventually, and branching on all of them would reach each
        # assignment once per ordering.
        def extend(depth):
            if depth == len(I):
                found.append(tuple(images))
                return
            cand = self._dedupe(self.candidates(I[:depth], images, I[depth], used))
            for j in cand:
                used[j] = True
                images.append(int(j))
                extend(depth + 1)
                images.pop()
                used[j] = False
                if limit is not None and len(found) >= limit:
                    return

        extend(0)
        return [Assignment(tuple(I), img) for img in found]

    def unique_assignment(self, I):
        found = self.valid_assignments(I, limit=2)
        return found[0] if len(found) == 1 else None

    def maximal(self, time_budget=None):
        start = time.perf_counter()
        examined = 0
        for size in range(self.a, 0, -1):
            for I in combinations(range(self.a), size):
                if time_budget is not None and time.perf_counter() - start > time_budget:
                    return LinkResult(Assignment(), False, examined, time.perf_counter() - start)
                examined += 1
                found = self.unique_assignment(I)
                if found is not None:
                    return LinkResult(found, True, examined, time.perf_counter() - start)
        return LinkResult(Assignment(), True, examined, time.perf_counter() - start)


def candidate_set(Xa, Y, assignment, i_hat, tol=1e-6, lengths_preserved=True):
    """All output columns that can extend a valid ``assignment`` by known input ``i_hat``."""
    if isinstance(assignment, dict):
        assignment = Assignment.from_dict(assignment)
    problem = LinkingProblem(Xa, Y, tol, lengths_preserved, collapse_duplicates=False)
    return problem.candidates(assignment.domain, assignment.images, int(i_hat))


def is_uniquely_valid(I, Xa, Y, tol=1e-6, lengths_preserved=True, collapse_duplicates=True):
    """Return the unique valid assignment on ``I``, or ``None`` when there are zero or several."""
    problem = LinkingProblem(Xa, Y, tol, lengths_preserved, collapse_duplicates)
    return problem.unique_assignment(I)


def find_maximal_uniquely_valid(
    Xa, Y, tol=1e-6, lengths_preserved=True, collapse_duplicates=True, time_budget=None
):
    """Level-wise search (largest subsets first, lexicographic order) for the maximal uniquely valid subset."""
    problem = LinkingProblem(Xa, Y, tol, lengths_preserved, collapse_duplicates)
    return problem.maximal(time_budget)


def is_valid_assignment(assignment, Xa, Y, tol=1e-6, lengths_preserved=True):
    problem = LinkingProblem(Xa, Y, tol, lengths_preserved, collapse_duplicates=False)
    dom, img = assignment.domain, assignment.images
    for p, (i, j) in enumerate(zip(dom, img)):
        cand = problem.candidates(dom[:p], img[:p], i)
        if j not in set(cand.tolist()):
            return False
    return True
