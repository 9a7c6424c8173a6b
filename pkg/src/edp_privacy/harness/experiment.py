"""Repeated attack runs with seeded secrets, evaluated against ground truth.

Seeding: the private data comes from ``SeedSequence([seed, 0])``; repetition
``r`` of sweep point ``i`` uses ``SeedSequence([seed, 1, i, r])``, so results
do not depend on worker count or execution order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np
import yaml

from ..errors import EDPError, InfeasibleAttackError, InputError
from ..known_input import known_input_attack, known_input_attack_general
from ..known_sample import pca_attack_general, pca_attack_orthogonal
from ..metrics import breach_columns, evaluate_breach
from ..perturbation import RecordPermutation, default_translation_scale, generate_rigid_motion, perturb
from .data import build_source

REPORT_SCHEMA_VERSION = 1
ATTACKS = ("known-input", "known-sample")

ROW_COLUMNS = [
    "value",
    "repetition",
    "status",
    "linked",
    "rho",
    "record",
    "eps_breach",
    "med_breach",
    "cos_breach",
    "eps_fraction",
    "med_fraction",
    "cos_fraction",
    "pvalue",
]
TIMING_COLUMNS = ["time_link", "time_attack"]
METRICS = [
    "linked",
    "rho",
    "eps_breach",
    "med_breach",
    "cos_breach",
    "eps_fraction",
    "med_fraction",
    "cos_fraction",
    "pvalue",
]


@dataclass
class ExperimentConfig:
    """One experiment: a data source, an attack, a sweep and the repetition protocol.

    ``known_inputs`` (known-input attack) or ``sample_ratio`` (known-sample
    attack) may be a single value or a list; each value is one sweep point.
    """

    data: dict
    attack: str
    seed: int
    epsilon: float = 0.15
    repetitions: int = 10
    known_inputs: Optional[list] = None
    sample_ratio: Optional[list] = None
    translation: bool = False
    translation_scale: Optional[float] = None
    tolerance: float = 1e-6
    rank_tol: float = 1e-9
    permutations: int = 199
    max_pooled: int = 2000
    time_budget: Optional[float] = None
    record_timings: bool = False
    name: str = ""

    def __post_init__(self):
        if self.attack not in ATTACKS:
            raise InputError(f"attack must be one of {ATTACKS}, got {self.attack!r}")
        if int(self.repetitions) < 1:
            raise InputError("repetitions must be at least 1")
        if self.epsilon < 0:
            raise InputError("epsilon must be non-negative")
        if self.seed is None:
            raise InputError("a seed is required")
        if not isinstance(self.data, dict) or "kind" not in self.data:
            raise InputError("data must be a mapping with a 'kind' key")
        self.seed = int(self.seed)
        self.repetitions = int(self.repetitions)
        self.epsilon = float(self.epsilon)
        self.known_inputs = _as_list(self.known_inputs, int)
        self.sample_ratio = _as_list(self.sample_ratio, float)
        if self.attack == "known-input" and self.known_inputs is None:
            raise InputError("a known-input experiment needs known_inputs")
        if self.attack == "known-sample" and self.sample_ratio is None:
            raise InputError("a known-sample experiment needs sample_ratio")

    @property
    def sweep(self):
        return self.known_inputs if self.attack == "known-input" else self.sample_ratio

    @classmethod
    def from_dict(cls, mapping):
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        return cls(**mapping)

    @classmethod
    def from_file(cls, path, **overrides):
        """Load a YAML or JSON config (JSON is valid YAML); non-None overrides replace file values."""
        with open(path) as fh:
            mapping = yaml.safe_load(fh) or {}
        mapping.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(mapping)

    def to_dict(self):
        return asdict(self)


def _as_list(value, kind):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return [kind(v) for v in value]
    return [kind(value)]


@dataclass
class ExperimentReport:
    """Per-repetition rows (ordered by sweep point, then repetition) and their aggregates."""

    config: dict
    rows: list = field(default_factory=list)
    timings: bool = False

    @property
    def columns(self):
        return ROW_COLUMNS + (TIMING_COLUMNS if self.timings else [])

    @property
    def aggregates(self):
        return aggregate_rows(self.rows, self.timings)

    def to_json_dict(self):
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "config": self.config,
            "columns": self.columns,
            "rows": [_jsonable(r) for r in self.rows],
            "aggregates": [_jsonable(a) for a in self.aggregates],
        }

    @classmethod
    def from_json_dict(cls, payload):
        if payload.get("schema_version") != REPORT_SCHEMA_VERSION:
            raise InputError(f"unsupported report schema {payload.get('schema_version')!r}")
        rows = [{k: (math.nan if v is None else v) for k, v in r.items()} for r in payload["rows"]]
        return cls(payload["config"], rows, TIMING_COLUMNS[0] in payload["columns"])


def _jsonable(row):
    return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in row.items()}


def _stats(values):
    vals = np.array([float(v) for v in values], dtype=float)
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        return math.nan, math.nan
    return float(vals.mean()), float(vals.std())


def aggregate_rows(rows, timings=False):
    """Mean and (population) standard deviation of each metric per sweep point."""
    metrics = METRICS + (TIMING_COLUMNS if timings else [])
    out = []
    values = []
    for r in rows:
        if r["value"] not in values:
            values.append(r["value"])
    for value in values:
        group = [r for r in rows if r["value"] == value]
        agg = {"value": value, "repetitions": len(group), "ok": sum(r["status"] == "ok" for r in group)}
        for name in metrics:
            agg[f"{name}_mean"], agg[f"{name}_std"] = _stats(r[name] for r in group)
        out.append(agg)
    return out


def _aggregate_columns(timings):
    cols = ["value", "repetitions", "ok"]
    for name in METRICS + (TIMING_COLUMNS if timings else []):
        cols += [f"{name}_mean", f"{name}_std"]
    return cols


def _blank_row(value, rep):
    row = {c: math.nan for c in ROW_COLUMNS}
    row.update(value=value, repetition=rep, status="ok", record=-1)
    return row


def _known_inputs(X, a, rng, tries=100):
    """``a`` distinct random columns, linearly independent when ``a <= n``."""
    n, m = X.shape
    if a < 1 or a > m:
        raise InputError(f"cannot draw {a} known inputs from {m} records")
    target = min(a, n)
    for _ in range(tries):
        idx = rng.choice(m, a, replace=False)
        if np.linalg.matrix_rank(X[:, idx]) == target:
            return idx
    return idx


def _secrets(cfg, X, rng):
    scale = cfg.translation_scale
    if cfg.translation and scale is None:
        scale = default_translation_scale(X)
    motion = generate_rigid_motion(X.shape[0], cfg.translation, scale or 0.0, rng)
    perm = RecordPermutation.random(X.shape[1], rng)
    return motion, perm, perturb(X, motion, perm)


def _run_known_input(cfg, X, a, rng, row):
    motion, perm, Y = _secrets(cfg, X, rng)
    idx = _known_inputs(X, a, rng)
    attack = known_input_attack_general if cfg.translation else known_input_attack
    start = time.perf_counter()
    try:
        report = attack(X[:, idx], Y, cfg.epsilon, rng, cfg.tolerance, cfg.rank_tol, True, cfg.time_budget)
    except InfeasibleAttackError:
        row.update(status="infeasible", linked=0, rho=0.0, eps_breach=0, med_breach=0, cos_breach=0)
        row.update(time_link=time.perf_counter() - start, time_attack=time.perf_counter() - start)
        return row
    elapsed = time.perf_counter() - start
    truth = X[:, perm.inverse().images[report.record]]
    outcome = evaluate_breach(truth, report.estimate, cfg.epsilon)
    row.update(
        linked=len(report.link),
        rho=report.rho,
        record=report.record,
        eps_breach=int(outcome.eps_breach),
        med_breach=int(outcome.med_breach),
        cos_breach=int(outcome.cos_breach),
        time_link=report.link.elapsed,
        time_attack=elapsed,
    )
    if not report.link.complete:
        row["status"] = "budget"
    return row


def _run_known_sample(cfg, source, ratio, rng, row):
    X = source.private
    motion, perm, Y = _secrets(cfg, X, rng)
    k = max(4 if cfg.translation else 2, int(round(ratio * X.shape[1])))
    S = source.sample(k, rng)
    attack = pca_attack_general if cfg.translation else pca_attack_orthogonal
    start = time.perf_counter()
    try:
        result = attack(S, Y, cfg.permutations, rng, cfg.max_pooled)
    except EDPError as exc:
        row.update(status=type(exc).__name__, eps_breach=0, med_breach=0, cos_breach=0)
        row.update(eps_fraction=0.0, med_fraction=0.0, cos_fraction=0.0)
        row.update(time_attack=time.perf_counter() - start)
        return row
    elapsed = time.perf_counter() - start
    truth = X[:, perm.inverse().images]
    cols = breach_columns(truth, result.estimates, cfg.epsilon)
    j = result.record
    row.update(
        record=j,
        eps_breach=int(cols["eps_breach"][j]),
        med_breach=int(cols["med_breach"][j]),
        cos_breach=int(cols["cos_breach"][j]),
        eps_fraction=float(cols["eps_breach"].mean()),
        med_fraction=float(cols["med_breach"].mean()),
        cos_fraction=float(cols["cos_breach"].mean()),
        pvalue=result.pvalue,
        time_attack=elapsed,
    )
    return row


_WORKER = {}


def _data_source(cfg):
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0]))
    return build_source(cfg.data, rng, holdout=cfg.attack == "known-sample")


def _init_worker(cfg_dict):
    cfg = ExperimentConfig.from_dict(cfg_dict)
    _WORKER["cfg"] = cfg
    _WORKER["source"] = _data_source(cfg)


def run_repetition(cfg, source, point, rep):
    """One seeded repetition at sweep point index ``point``; returns its report row."""
    value = cfg.sweep[point]
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1, point, rep]))
    row = _blank_row(value, rep)
    row.update(time_link=math.nan, time_attack=math.nan)
    if cfg.attack == "known-input":
        row = _run_known_input(cfg, source.private, value, rng, row)
    else:
        row = _run_known_sample(cfg, source, value, rng, row)
    if not cfg.record_timings:
        for c in TIMING_COLUMNS:
            row.pop(c, None)
    return row


def _worker_task(args):
    point, rep = args
    return run_repetition(_WORKER["cfg"], _WORKER["source"], point, rep)


def run_experiment(cfg, workers=1):
    """Run every repetition of every sweep point and collect the rows in a stable order."""
    tasks = [(i, r) for i in range(len(cfg.sweep)) for r in range(cfg.repetitions)]
    if workers and workers > 1:
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(cfg.to_dict(),)) as pool:
            rows = list(pool.map(_worker_task, tasks))
    else:
        source = _data_source(cfg)
        rows = [run_repetition(cfg, source, i, r) for i, r in tasks]
    return ExperimentReport(cfg.to_dict(), rows, cfg.record_timings)


def _csv_cell(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def report_csv(report):
    """Two CSV blocks separated by a blank line: per-repetition rows, then one aggregate row per sweep point."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for r in report.rows:
        writer.writerow([_csv_cell(r[c]) for c in report.columns])
    writer.writerow([])
    agg_cols = _aggregate_columns(report.timings)
    writer.writerow(agg_cols)
    for a in report.aggregates:
        writer.writerow([_csv_cell(a[c]) for c in agg_cols])
    return buf.getvalue()


def report_json(report):
    return json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n"


def emit_report(report, fmt, path):
    """Write ``report`` as ``csv`` or ``json`` to ``path`` (``-`` for standard output)."""
    if fmt == "csv":
        text = report_csv(report)
    elif fmt == "json":
        text = report_json(report)
    else:
        raise InputError(f"unknown report format {fmt!r}")
    if path in (None, "-"):
        sys.stdout.write(text)
        return text
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return text
