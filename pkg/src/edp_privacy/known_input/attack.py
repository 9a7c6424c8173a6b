"""End-to-end known-input attack: link, pick the most exposed column, estimate it."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import InfeasibleAttackError, InputError
from ..linalg import as_rng, check_data_matrix
from .estimation import cap_fraction, constraint_set_sampler
from .linking import LinkResult, find_maximal_uniquely_valid


@dataclass
class BreachReport:
    """Result of a known-input attack.

    ``rho_table[j]`` is the breach probability of column ``j`` (NaN for
    linked columns); ``record`` is the column with the largest value and
    ``estimate`` the sampled estimate of its private record.
    """

    record: int
    estimate: np.ndarray
    rho: float
    rho_table: np.ndarray
    estimator: np.ndarray
    codim: int
    eps: float
    link: Optional[LinkResult] = None
    anchor: Optional[int] = None

    @property
    def linked_size(self):
        return 0 if self.link is None else len(self.link)


def _rho_table(norms, comp_norms, eps, codim, linked):
    table = np.full(norms.shape[0], np.nan)
    for j in range(norms.shape[0]):
        if j in linked:
            continue
        table[j] = cap_fraction(eps * norms[j], min(comp_norms[j], norms[j]), codim)
    return table


def _check_linked(Xq, Yq, Y, linked_columns):
    Y = check_data_matrix(Y, "Y", allow_zero_records=True)
    Xq = np.asarray(Xq, dtype=float)
    Yq = np.asarray(Yq, dtype=float)
    if Xq.ndim == 1:
        Xq, Yq = Xq[:, None], Yq.reshape(-1, 1)
    linked = [int(j) for j in linked_columns]
    if Xq.shape != Yq.shape or Xq.shape[1] != len(linked):
        raise InputError("linked inputs, outputs and column indices disagree in count")
    if Xq.shape[0] != Y.shape[0]:
        raise InputError("linked records and released data differ in dimension")
    if len(set(linked)) == Y.shape[1]:
        raise InfeasibleAttackError("every released column is already linked")
    return Xq, Yq, Y, set(linked)


def input_output_attack(Xq, Yq, Y, linked_columns, eps, rng=None, rank_tol=1e-9):
    """Attack an orthogonal perturbation given known input/output pairs ``Yq = M Xq``.

    ``linked_columns`` are the indices of ``Yq``'s columns inside ``Y``; they
    are excluded from the choice of target.
    """
    Xq, Yq, Y, linked = _check_linked(Xq, Yq, Y, linked_columns)
    sampler = constraint_set_sampler(Xq, Yq, rank_tol)
    table = _rho_table(np.linalg.norm(Y, axis=0), sampler.complement_norms(Y), eps, sampler.codim, linked)
    j = int(np.nanargmax(table))
    M_hat, _ = sampler.draw(as_rng(rng))
    return BreachReport(j, M_hat.T @ Y[:, j], float(table[j]), table, M_hat, sampler.codim, float(eps))


def input_output_attack_general(Xq, Yq, Y, linked_columns, eps, rng=None, rank_tol=1e-9):
    """Attack ``y = M x + v`` with unknown translation from linked pairs.

    For each anchor pair ``(x_t, y_t)`` the differences ``x_i - x_t`` and
    ``y_i - y_t`` are related by ``M`` alone, so the orthogonal-case analysis
    applies to them.  The breach probability is evaluated on the difference
    geometry (error relative to ``||x_j - x_t||``).  Every anchor is scanned;
    ties go to the last linked record.
    """
    Xq, Yq, Y, linked = _check_linked(Xq, Yq, Y, linked_columns)
    cols = [int(j) for j in linked_columns]
    q = Xq.shape[1]
    if q < 2:
        raise InfeasibleAttackError("the translation-aware attack needs at least two linked records")
    best = None
    for t in reversed(range(q)):
        others = [i for i in range(q) if i != t]
        Xd = Xq[:, others] - Xq[:, [t]]
        Yd = Yq[:, others] - Yq[:, [t]]
        sampler = constraint_set_sampler(Xd, Yd, rank_tol)
        D = Y - Y[:, [cols[t]]]
        table = _rho_table(np.linalg.norm(D, axis=0), sampler.complement_norms(D), eps, sampler.codim, linked)
        j = int(np.nanargmax(table))
        if best is None or table[j] > best[2][best[3]]:
            best = (t, sampler, table, j)
    t, sampler, table, j = best
    M_hat, _ = sampler.draw(as_rng(rng))
    estimate = Xq[:, t] + M_hat.T @ (Y[:, j] - Y[:, cols[t]])
    return BreachReport(j, estimate, float(table[j]), table, M_hat, sampler.codim, float(eps), anchor=t)


def _linked_pairs(Xa, Y, link):
    dom, img = list(link.indices), list(link.images)
    return Xa[:, dom], Y[:, img], img


def known_input_attack(
    Xa, Y, eps, rng=None, tol=1e-6, rank_tol=1e-9, collapse_duplicates=True, time_budget=None
):
    """Full attack on an orthogonal perturbation from known private records ``Xa``.

    Raises :class:`InfeasibleAttackError` when no known input can be linked
    unambiguously.
    """
    Xa = check_data_matrix(Xa, "Xa")
    Y = check_data_matrix(Y, "Y")
    link = find_maximal_uniquely_valid(Xa, Y, tol, True, collapse_duplicates, time_budget)
    if len(link) == 0:
        raise InfeasibleAttackError("no known input could be linked unambiguously")
    Xq, Yq, cols = _linked_pairs(Xa, Y, link)
    report = input_output_attack(Xq, Yq, Y, cols, eps, rng, rank_tol)
    report.link = link
    return report


def known_input_attack_general(
    Xa, Y, eps, rng=None, tol=1e-6, rank_tol=1e-9, collapse_duplicates=True, time_budget=None
):
    """Full attack on ``y = M x + v``: distance-only linking, then the difference construction.

    ``report.anchor`` indexes into the linked records (``report.link.indices``).
    """
    Xa = check_data_matrix(Xa, "Xa", allow_zero_records=True)
    Y = check_data_matrix(Y, "Y", allow_zero_records=True)
    link = find_maximal_uniquely_valid(Xa, Y, tol, False, collapse_duplicates, time_budget)
    if len(link) < 2:
        raise InfeasibleAttackError("fewer than two known inputs could be linked unambiguously")
    Xq, Yq, cols = _linked_pairs(Xa, Y, link)
    report = input_output_attack_general(Xq, Yq, Y, cols, eps, rng, rank_tol)
    report.link = link
    return report
