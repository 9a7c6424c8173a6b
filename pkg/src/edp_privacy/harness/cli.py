"""Command-line front end.

Data files are numeric CSV with one record per row.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from ..errors import EDPError
from ..known_input import known_input_attack, known_input_attack_general
from ..known_sample import pca_attack_general, pca_attack_orthogonal
from ..linalg import as_rng
from ..metrics import breach_columns
from ..perturbation import (
    RecordPermutation,
    RigidMotion,
    default_translation_scale,
    generate_rigid_motion,
    perturb,
)
from .data import ingest_csv, write_csv
from .experiment import ExperimentConfig, emit_report, run_experiment


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_secret(path):
    with open(path) as fh:
        payload = json.load(fh)
    motion = RigidMotion(np.array(payload["matrix"]), np.array(payload["translation"]))
    return motion, RecordPermutation(np.array(payload["permutation"]))


def cmd_perturb(args):
    X = ingest_csv(args.input, args.has_header, args.dedup)
    rng = as_rng(args.seed)
    scale = args.translation_scale
    if args.translation and scale is None:
        scale = default_translation_scale(X)
    motion = generate_rigid_motion(X.shape[0], args.translation, scale or 0.0, rng)
    if args.identity_permutation:
        perm = RecordPermutation.identity(X.shape[1])
    else:
        perm = RecordPermutation.random(X.shape[1], rng)
    write_csv(args.output, perturb(X, motion, perm))
    if args.secret:
        _write_json(
            args.secret,
            {
                "matrix": motion.matrix.tolist(),
                "translation": motion.translation.tolist(),
                "permutation": perm.images.tolist(),
            },
        )
    return 0


def cmd_attack_known_input(args):
    Y = ingest_csv(args.released, args.has_header)
    Xa = ingest_csv(args.known, args.has_header)
    attack = known_input_attack_general if args.translation else known_input_attack
    report = attack(Xa, Y, args.epsilon, as_rng(args.seed), args.tol, args.rank_tol, True, args.time_budget)
    _write_json(
        args.output,
        {
            "record": report.record,
            "rho": report.rho,
            "estimate": report.estimate.tolist(),
            "codim": report.codim,
            "epsilon": report.eps,
            "linked_inputs": list(report.link.indices),
            "linked_columns": list(report.link.images),
            "anchor": report.anchor,
            "rho_table": [None if np.isnan(v) else float(v) for v in report.rho_table],
        },
    )
    return 0


def cmd_attack_known_sample(args):
    Y = ingest_csv(args.released, args.has_header)
    S = ingest_csv(args.sample, args.has_header)
    attack = pca_attack_general if args.translation else pca_attack_orthogonal
    result = attack(S, Y, args.permutations, as_rng(args.seed), args.max_pooled)
    write_csv(args.output, result.estimates)
    summary = {
        "estimator": result.estimator.tolist(),
        "signs": result.signs.tolist(),
        "pvalue": result.pvalue,
        "translation": result.translation.tolist(),
        "record": result.record,
        "sample_eigen_ratio": result.diagnostics.sample_eigen_ratio,
        "data_eigen_ratio": result.diagnostics.data_eigen_ratio,
        "warnings": result.diagnostics.warnings,
    }
    _write_json(args.summary, summary)
    return 0


def cmd_evaluate(args):
    X = ingest_csv(args.truth, args.has_header)
    X_hat = ingest_csv(args.estimate, args.has_header)
    if args.secret:
        _, perm = _load_secret(args.secret)
        X = X[:, perm.inverse().images]
    cols = breach_columns(X, X_hat, args.epsilon)
    summary = {
        "records": int(X.shape[1]),
        "epsilon": args.epsilon,
        "eps_fraction": float(cols["eps_breach"].mean()),
        "med_fraction": float(cols["med_breach"].mean()),
        "cos_fraction": float(cols["cos_breach"].mean()),
        "relative_euclid_median": float(np.median(cols["relative_euclid"])),
    }
    _write_json(args.output, summary)
    return 0


def cmd_experiment(args):
    cfg = ExperimentConfig.from_file(
        args.config,
        seed=args.seed,
        epsilon=args.epsilon,
        repetitions=args.repetitions,
        translation=args.translation,
        permutations=args.permutations,
        record_timings=args.record_timings or None,
    )
    report = run_experiment(cfg, args.workers)
    emit_report(report, args.format, args.output)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="edp-privacy", description="Distance-preserving perturbation and attacks against it."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("perturb", help="release a rotated (and optionally translated) copy of a dataset")
    p.add_argument("--input", required=True, help="private data CSV")
    p.add_argument("--output", required=True, help="released data CSV")
    p.add_argument("--secret", help="JSON file receiving the matrix, translation and permutation")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--translation", action="store_true", help="add a random translation")
    p.add_argument("--translation-scale", type=float, help="std of translation entries (default 10x mean record norm)")
    p.add_argument("--identity-permutation", action="store_true", help="keep the record order")
    p.add_argument("--has-header", action="store_true")
    p.add_argument("--dedup", action="store_true", help="drop duplicate records first")
    p.set_defaults(func=cmd_perturb)

    attack = sub.add_parser("attack", help="run an attack on released data")
    attack_sub = attack.add_subparsers(dest="attack", required=True)

    ki = attack_sub.add_parser("known-input", help="attack from known private records")
    ki.add_argument("--released", required=True)
    ki.add_argument("--known", required=True, help="CSV of known private records")
    ki.add_argument("--epsilon", type=float, default=0.15)
    ki.add_argument("--seed", type=int, required=True)
    ki.add_argument("--translation", action="store_true", help="the release may include a translation")
    ki.add_argument("--tol", type=float, default=1e-6, help="relative tolerance for distance matching")
    ki.add_argument("--rank-tol", type=float, default=1e-9)
    ki.add_argument("--time-budget", type=float, help="seconds allowed for the linking search")
    ki.add_argument("--output", default="-", help="JSON result (default stdout)")
    ki.add_argument("--has-header", action="store_true")
    ki.set_defaults(func=cmd_attack_known_input)

    ks = attack_sub.add_parser("known-sample", help="PCA attack from an independent sample")
    ks.add_argument("--released", required=True)
    ks.add_argument("--sample", required=True, help="CSV of the attacker's sample")
    ks.add_argument("--seed", type=int, required=True)
    ks.add_argument("--translation", action="store_true")
    ks.add_argument("--permutations", type=int, default=199)
    ks.add_argument("--max-pooled", type=int, default=2000)
    ks.add_argument("--output", required=True, help="CSV of estimated records, in released order")
    ks.add_argument("--summary", default="-", help="JSON summary (default stdout)")
    ks.add_argument("--has-header", action="store_true")
    ks.set_defaults(func=cmd_attack_known_sample)

    ev = sub.add_parser("evaluate", help="breach fractions of estimates against the truth")
    ev.add_argument("--truth", required=True, help="private data CSV")
    ev.add_argument("--estimate", required=True, help="estimates CSV")
    ev.add_argument("--secret", help="secret JSON; aligns the truth to released order")
    ev.add_argument("--epsilon", type=float, required=True)
    ev.add_argument("--output", default="-")
    ev.add_argument("--has-header", action="store_true")
    ev.set_defaults(func=cmd_evaluate)

    ex = sub.add_parser("experiment", help="run a configured experiment and write a report")
    ex.add_argument("--config", required=True, help="YAML or JSON experiment config")
    ex.add_argument("--seed", type=int, required=True)
    ex.add_argument("--output", default="-")
    ex.add_argument("--format", choices=("csv", "json"), default="csv")
    ex.add_argument("--workers", type=int, default=1)
    ex.add_argument("--epsilon", type=float)
    ex.add_argument("--repetitions", type=int)
    ex.add_argument("--permutations", type=int)
    ex.add_argument("--translation", action="store_true", default=None)
    ex.add_argument("--record-timings", action="store_true", help="add wall-clock columns (not reproducible)")
    ex.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EDPError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
