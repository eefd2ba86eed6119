"""Command line entry point: ``repkit {datagen,fit,predict,check}``.

Exit codes: 0 success, 1 a verdict did not match its expectation, 2 usage
or parse error. The default seed is 42, overridden by ``REPKIT_SEED``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .datasets import CsvError, blobs3, read_csv, read_inputs, sinusoid_gp, sparse_features, table_csv, to_csv
from .deepnet import DeepNetState, fit_deep_net, parse_layers
from .kernels import KernelSpec
from .learners import DEFAULT_WINDOW, Dataset, LearnerConfig, fit_gp, fit_l1, fit_l1_dictionary, fit_ridge, fit_svm
from .operators import FeatureMap
from .persist import ModelFormatError, load_model, prediction_table, save_model
from .suites import SUITES, report_json, report_ok, run_suites

__all__ = ["main", "build_parser", "cmd_datagen", "cmd_fit", "cmd_predict", "cmd_check", "default_seed"]

log = logging.getLogger("repkit")

EXIT_OK, EXIT_VERDICT, EXIT_USAGE = 0, 1, 2


def default_seed() -> int:
    env = os.environ.get("REPKIT_SEED")
    return int(env) if env not in (None, "") else 42


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_datagen(args) -> int:
    if args.kind == "blobs3":
        data = blobs3(args.n or 20, args.seed)
    elif args.kind == "sinusoid_gp":
        data = sinusoid_gp(args.n or 12, args.seed)
    else:
        dead = [int(j) for j in args.dead.split(",") if j.strip()] if args.dead else []
        data = sparse_features(args.n or 30, args.features, dead, args.seed)
    _emit(to_csv(data), args.out)
    return EXIT_OK


def _kernel(args) -> KernelSpec:
    return KernelSpec(args.kernel, args.lengthscale, args.degree)


def cmd_fit(args) -> int:
    data = read_csv(args.data)
    kernel = _kernel(args)
    learner = args.learner
    if learner == "ridge":
        model = fit_ridge(data, LearnerConfig(args.lam, kernel))
    elif learner == "gp":
        noise = args.noise * np.eye(data.n)
        model = fit_gp(data, LearnerConfig(args.lam, kernel, noise))
    elif learner == "svm":
        if data.is_onehot:
            raise ValueError("svm needs a single +-1 label column")
        model = fit_svm(data, LearnerConfig(args.lam, kernel))
    elif learner == "l1":
        model = fit_l1(data, FeatureMap.identity(data.d), args.lam)
    elif learner == "l1_dictionary":
        model = fit_l1_dictionary(data, args.lam, args.window)
    else:
        state0 = DeepNetState.initial(data.X, parse_layers(args.layers), kernel, lam=args.lam,
                                      rounds=args.rounds, seed=args.seed)
        model = fit_deep_net(data.X, data.Y, state0)
    if args.out is None:
        raise ValueError("fit needs --out for the model file")
    save_model(model, args.out, args.seed)
    return EXIT_OK


def cmd_predict(args) -> int:
    model = load_model(args.model)
    header, rows = prediction_table(model, read_inputs(args.data))
    _emit(table_csv(header, rows), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    report = run_suites(args.suite, args.seed)
    _emit(report_json(report), args.out)
    for fid in report["summary"]["failed"]:
        log.warning("unexpected verdict: %s", fid)
    return EXIT_OK if report_ok(report) else EXIT_VERDICT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="repkit", description="Representer-reduced learners and property checks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default_seed(), help="RNG seed (default 42 or $REPKIT_SEED)")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("datagen", parents=[common], help="write a synthetic dataset as CSV")
    d.add_argument("kind", choices=["blobs3", "sinusoid_gp", "sparse_features"])
    d.add_argument("--n", type=int, default=None, help="points per class (blobs3) or sample count")
    d.add_argument("--features", type=int, default=8, help="feature count for sparse_features")
    d.add_argument("--dead", default="2,5", help="comma-separated dead feature indices")
    d.set_defaults(func=cmd_datagen)

    f = sub.add_parser("fit", parents=[common], help="fit a learner and save the model as JSON")
    f.add_argument("learner", choices=["ridge", "gp", "svm", "l1", "l1_dictionary", "deep"])
    f.add_argument("--data", required=True)
    f.add_argument("--kernel", choices=["sqexp", "linear", "poly"], default="sqexp")
    f.add_argument("--lengthscale", type=float, default=1.0)
    f.add_argument("--degree", type=int, default=2)
    f.add_argument("--lambda", dest="lam", type=float, default=1e-2)
    f.add_argument("--noise", type=float, default=0.0, help="GP observation noise variance (isotropic)")
    f.add_argument("--layers", default="3:tanh,3:tanh,3:identity", help="deep net layers as width:activation,...")
    f.add_argument("--rounds", type=int, default=8, help="deep net penalty rounds")
    f.add_argument("--window", type=int, default=DEFAULT_WINDOW, help="half width of the l2(Z) index window")
    f.set_defaults(func=cmd_fit)

    r = sub.add_parser("predict", parents=[common], help="predict with a saved model")
    r.add_argument("--model", required=True)
    r.add_argument("--data", required=True, help="CSV with x_ columns")
    r.set_defaults(func=cmd_predict)

    c = sub.add_parser("check", parents=[common], help="run property suites and emit a JSON report")
    c.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CsvError, ModelFormatError, ValueError, OSError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"repkit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
