"""Dataset ingestion and synthetic generators.

Files hold one record per row; everything returned here is ``n x m`` with
records as columns.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import CsvFormatError, InputError
from ..linalg import as_rng

LETTER_ENV = "EDP_LETTER_CSV"


def dedup_records(X):
    """Drop repeated columns, keeping the first occurrence of each."""
    _, first = np.unique(X.T, axis=0, return_index=True)
    return X[:, np.sort(first)]


def ingest_csv(path, has_header=False, dedup=False, columns=None):
    """Read a numeric CSV (rows are records) into an ``n x m`` array.

    ``columns`` optionally selects attributes by 0-based position.  Parse
    errors report 1-based file row and column.
    """
    rows = []
    width = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for line_no, row in enumerate(reader, start=1):
            if has_header and line_no == 1:
                continue
            if not row or all(not cell.strip() for cell in row):
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise CsvFormatError(f"expected {width} fields, found {len(row)}", row=line_no)
            values = []
            for col_no, cell in enumerate(row, start=1):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise CsvFormatError(f"non-numeric cell {cell!r}", row=line_no, column=col_no) from None
            rows.append(values)
    if not rows:
        raise CsvFormatError("no data rows")
    X = np.array(rows, dtype=float).T
    if not np.all(np.isfinite(X)):
        bad = np.argwhere(~np.isfinite(X.T))[0]
        raise CsvFormatError("non-finite value", row=int(bad[0]) + 1 + int(has_header), column=int(bad[1]) + 1)
    if columns is not None:
        X = X[list(columns)]
    if dedup:
        X = dedup_records(X)
    return X


def write_csv(path, X, header=None):
    """Write ``n x m`` data as a CSV with one record per row."""
    X = np.asarray(X, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if header is not None:
            writer.writerow(header)
        for record in X.T:
            writer.writerow([repr(float(v)) for v in record])


def gaussian(mean, cov, m, rng=None):
    """``m`` draws from ``N(mean, cov)`` as columns."""
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    return as_rng(rng).multivariate_normal(mean, cov, int(m), method="eigh").T


def gaussian_mixture(weights, means, covs, m, rng=None):
    """``m`` draws from a Gaussian mixture; component labels are drawn independently per record."""
    rng = as_rng(rng)
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 1 or np.any(weights < 0) or weights.sum() <= 0:
        raise InputError("mixture weights must be non-negative and not all zero")
    if len(means) != weights.size or len(covs) != weights.size:
        raise InputError("mixture needs one mean and one covariance per weight")
    labels = rng.choice(weights.size, size=int(m), p=weights / weights.sum())
    n = len(means[0])
    X = np.empty((n, int(m)))
    for c in range(weights.size):
        idx = np.flatnonzero(labels == c)
        if idx.size:
            X[:, idx] = gaussian(means[c], covs[c], idx.size, rng)
    return X


@dataclass(frozen=True)
class RandomGaussianModel:
    """Gaussian with a random ``N(0, 1)`` mean and the empirical covariance of ``n`` random tuples.

    The covariance has rank ``n - 1``; draws use its centered square root so
    no factorization of a singular matrix is needed.
    """

    mean: np.ndarray
    root: np.ndarray

    @property
    def cov(self):
        return self.root @ self.root.T

    @classmethod
    def draw(cls, n, rng=None):
        rng = as_rng(rng)
        mean = rng.standard_normal(n)
        G = rng.standard_normal((n, n))
        G -= G.mean(axis=1, keepdims=True)
        return cls(mean, G / np.sqrt(n - 1))

    def sample(self, m, rng=None):
        Zs = as_rng(rng).standard_normal((self.root.shape[1], int(m)))
        return self.mean[:, None] + self.root @ Zs


# Marginal means and standard deviations of the 16 Letter Recognition attributes.
LETTER_MEANS = np.array([4.02, 7.04, 5.12, 5.37, 3.51, 6.90, 7.50, 4.63, 5.18, 8.28, 6.45, 7.93, 3.05, 8.34, 3.69, 7.80])
LETTER_STDS = np.array([1.91, 3.30, 2.01, 2.26, 2.19, 2.03, 2.33, 2.70, 2.38, 2.49, 2.63, 2.08, 2.33, 1.55, 2.57, 1.62])


def letter_like(m=20000, rng=None, classes=26, fonts=40, dedup=True):
    """Synthetic stand-in for the 16 integer Letter attributes in ``[0, 15]``.

    Each record is a jittered copy of one of ``classes * fonts`` templates
    (a class prototype shifted per font), rounded and clipped.  Marginal
    means and spreads follow the real attributes, and the jitter is sized so
    that about 7% of 20000 records are exact duplicates, as in the real
    file.  Duplicates are removed by default.
    """
    rng = as_rng(rng)
    dim = LETTER_MEANS.size
    s = LETTER_STDS[:, None]
    prototypes = LETTER_MEANS[:, None] + 0.9 * s * rng.standard_normal((dim, classes))
    templates = np.repeat(prototypes, fonts, axis=1) + 0.5 * s * rng.standard_normal((dim, classes * fonts))
    labels = rng.integers(templates.shape[1], size=int(m))
    X = templates[:, labels] + 0.1 * s * rng.standard_normal((dim, int(m)))
    X = np.clip(np.rint(X), 0, 15)
    X = X[:, np.any(X != 0, axis=0)]
    return dedup_records(X) if dedup else X


def letter_data(rng=None, path=None, dedup=True):
    """The Letter Recognition attributes when a file is available, else :func:`letter_like`.

    The file may be given directly or through the ``EDP_LETTER_CSV``
    environment variable; its first field (the class letter) is skipped.
    Returns ``(X, source)`` where ``source`` is ``"file"`` or ``"synthetic"``.
    """
    path = path or os.environ.get(LETTER_ENV)
    if path and os.path.exists(path):
        with open(path, newline="") as fh:
            first = next(csv.reader(fh))
        X = ingest_csv(path) if _numeric(first) else _ingest_skip_first(path)
        return (dedup_records(X) if dedup else X), "file"
    return letter_like(rng=rng, dedup=dedup), "synthetic"


def _numeric(row):
    try:
        [float(c) for c in row]
    except ValueError:
        return False
    return True


def _ingest_skip_first(path):
    rows = []
    with open(path, newline="") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            try:
                rows.append([float(c) for c in row[1:]])
            except ValueError:
                raise CsvFormatError("non-numeric attribute", row=line_no) from None
    return np.array(rows, dtype=float).T


@dataclass
class DataSource:
    """Private data plus a way to draw an attacker's independent sample.

    Synthetic sources sample the generator again; file sources hold back a
    disjoint random part of the file for the attacker.
    """

    private: np.ndarray
    sampler: object = None
    holdout: Optional[np.ndarray] = None

    def sample(self, k, rng=None):
        rng = as_rng(rng)
        if self.sampler is not None:
            return self.sampler(int(k), rng)
        if self.holdout is None or self.holdout.shape[1] < k:
            raise InputError("not enough held-out records for the requested sample")
        return self.holdout[:, rng.choice(self.holdout.shape[1], int(k), replace=False)]


def build_source(config, rng=None, holdout=False):
    """Build a :class:`DataSource` from a generator config (a mapping with a ``kind`` key).

    Kinds: ``gaussian`` (mean, cov, records), ``mixture`` (weights, means,
    covs, records), ``random_gaussian`` (dim, records), ``letter``
    (records for the synthetic fallback; optional path) and ``csv`` (path,
    has_header, dedup, columns).  With ``holdout`` a file-backed source is
    split in half at random, one half private and the other the attacker's pool.
    """
    rng = as_rng(rng)
    config = dict(config)
    kind = config.get("kind")
    if kind == "gaussian":
        mean, cov = config["mean"], config["cov"]
        return DataSource(gaussian(mean, cov, config["records"], rng), lambda k, r: gaussian(mean, cov, k, r))
    if kind == "mixture":
        w, mu, cv = config["weights"], config["means"], config["covs"]
        return DataSource(
            gaussian_mixture(w, mu, cv, config["records"], rng), lambda k, r: gaussian_mixture(w, mu, cv, k, r)
        )
    if kind == "random_gaussian":
        model = RandomGaussianModel.draw(int(config.get("dim", 100)), rng)
        return DataSource(model.sample(config["records"], rng), model.sample)
    if kind == "letter":
        X, _ = letter_data(rng, config.get("path"), config.get("dedup", True))
        if config.get("records"):
            X = X[:, : int(config["records"])]
        if config.get("columns") is not None:
            X = X[list(config["columns"])]
        return _file_source(X, rng, holdout)
    if kind == "csv":
        X = ingest_csv(config["path"], config.get("has_header", False), config.get("dedup", False), config.get("columns"))
        return _file_source(X, rng, holdout)
    raise InputError(f"unknown data kind {kind!r}")


def _file_source(X, rng, holdout):
    if not holdout:
        return DataSource(X)
    order = rng.permutation(X.shape[1])
    half = X.shape[1] // 2
    return DataSource(X[:, order[:half]], holdout=X[:, order[half:]])
