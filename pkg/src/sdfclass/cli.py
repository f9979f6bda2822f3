"""Command-line entry point: ``sdfclass <subcommand> [flags]``.

Exit status is 0 on success, 1 on usage errors and 2 on data or contract
errors. Output files are only written after all computation succeeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, synthdata
from .dataset import DataError, Metric, correlation_weights, load_csv, load_features_csv, write_csv
from .kernel_sdf import DEFAULT_GAMMA, KernelModel, iterate_kernel
from .linear_sdf import LinearModel, classify, iterate_linear, normalize
from .modelselect import CvConfig, cross_validate, loocv_predictions, resolve_sigma
from .sdf_estimate import estimate, write_estimates_csv


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from None


def _folds(text: str):
    if str(text).lower() == "loo":
        return "loo"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--folds must be an integer or 'loo', got {text!r}") from None


def _data_args(p, labeled=True):
    p.add_argument("--data", help="input CSV with a header row")
    if labeled:
        p.add_argument("--label-column", default="label", help="label column name or 0-based index")
        p.add_argument("--positive-label", default="1", help="label value mapped to +1")


def _metric_arg(p):
    p.add_argument("--metric", choices=["euclidean", "correlation-weighted"], default="euclidean")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sdfclass", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON object of flag values (keys as flag names); flags win")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("gen", help="write a synthetic dataset to CSV")
    p.add_argument("--kind",
                   choices=["uniform", "normal", "skewed", "checkerboard", "checkerboard-grid", "planted"])
    p.add_argument("--m", type=int)
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--n", type=int, default=5000, help="planted: dimension")
    p.add_argument("--informative", type=int, default=50, help="planted: shifted features")
    p.add_argument("--shift", type=float, default=1.0, help="planted: class shift in standard deviations")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")

    p = sub.add_parser("estimate", help="signed distance estimates at the data points")
    _data_args(p)
    _metric_arg(p)
    p.add_argument("--stage", choices=["initial", "midpoint"], default="midpoint")
    p.add_argument("--out")

    p = sub.add_parser("train", help="fit a linear or kernel SDF model")
    _data_args(p)
    _metric_arg(p)
    p.add_argument("--model", choices=["linear", "kernel"])
    p.add_argument("--sigma", type=float)
    p.add_argument("--sigma-rule", choices=["mean", "rmsd"])
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    p.add_argument("--iterations", type=int, default=0)
    p.add_argument("--stage", choices=["initial", "midpoint"], default="midpoint")
    p.add_argument("--normalize", action="store_true", help="linear: rescale to |w| = 1")
    p.add_argument("--out")

    p = sub.add_parser("predict", help="apply a model JSON to a CSV")
    p.add_argument("--model")
    _data_args(p, labeled=False)
    p.add_argument("--label-column", default="label",
                   help="column excluded from the features when present (default: label)")
    p.add_argument("--positive-label", default="1")
    p.add_argument("--out", help="predictions CSV (default: stdout)")

    p = sub.add_parser("cv", help="grid search for sigma and gamma")
    _data_args(p)
    _metric_arg(p)
    p.add_argument("--sigma-grid", type=_floats)
    p.add_argument("--gamma-grid", type=_floats, default=[DEFAULT_GAMMA])
    p.add_argument("--sigma-relative", choices=["none", "mean", "rmsd"], default="none",
                   help="treat --sigma-grid as multiples of this inter-point distance statistic")
    p.add_argument("--folds", type=_folds, default=5)
    p.add_argument("--stage", choices=["initial", "midpoint"], default="midpoint")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")

    p = sub.add_parser("loocv", help="leave-one-out accuracy of the kernel classifier")
    _data_args(p)
    _metric_arg(p)
    p.add_argument("--sigma", type=float)
    p.add_argument("--sigma-rule", choices=["mean", "rmsd"])
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    p.add_argument("--stage", choices=["initial", "midpoint"], default="midpoint")
    p.add_argument("--out", help="JSON result file")

    for name in ("bench-linear", "bench-checkerboard"):
        p = sub.add_parser(name, help="run the %s benchmark" % name.split("-")[1])
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--full", action="store_true", help="use the full published trial counts")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", help="report JSON; a per-trial CSV is written next to it")
        p.add_argument("--record-time", action="store_true",
                       help="store wall-clock times in the JSON (output is then not reproducible)")
        if name == "bench-linear":
            p.add_argument("--kind", choices=["uniform", "normal", "skewed"], default="uniform")
            p.add_argument("--m-values", type=_ints, default=list(bench.DEFAULT_M_VALUES))
            p.add_argument("--test-size", type=int, default=4000)
            p.add_argument("--iterations", type=_ints, default=[0, 5],
                           help="one variant per iteration count")
            p.add_argument("--figure-csv", help="log10(m) vs mean accuracy table")
            p.add_argument("--baseline", help="external CSV (variant,m,mean_accuracy) merged into --figure-csv")
        else:
            p.add_argument("--train-m", type=int, default=1000)
            p.add_argument("--resolution", type=int, default=200)
            p.add_argument("--sigma-grid", type=_floats, default=[0.1, 0.15, 0.2, 0.25])
            p.add_argument("--gamma-grid", type=_floats, default=[1e-2, 1e-3, 1e-4])
            p.add_argument("--sigma-relative", choices=["none", "mean", "rmsd"], default="mean")
            p.add_argument("--folds", type=_folds, default=5)
    return parser


def _apply_config(parser, argv):
    """Parse ``argv``; values from ``--config`` fill in flags not given on the command line."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        with open(args.config, encoding="utf-8") as fh:
            overlay = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"--config: cannot read {args.config}: {exc}") from None
    if not isinstance(overlay, dict):
        raise UsageError("--config: expected a flat JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions if a.dest != "help"}
    defaults = {}
    for key, value in overlay.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in known:
            raise UsageError(f"--config: unknown key {key!r} for {args.command}")
        action = known[dest]
        if isinstance(value, (dict, list)) and action.type in (_floats, _ints):
            value = ",".join(str(v) for v in value)
        if action.type is not None and isinstance(value, (str, int, float)) and not isinstance(value, bool):
            try:
                value = action.type(str(value))
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"--config: bad value for {key!r}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"--config: {key!r} must be one of {list(action.choices)}")
        defaults[dest] = value
    sub.set_defaults(**defaults)
    for a in sub._actions:
        if a.dest in defaults and a.required:
            a.required = False
    return parser.parse_args(argv)


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"{args.command}: missing required flag --{name.replace('_', '-')}")


def _check_positive(args, *names):
    for name in names:
        v = getattr(args, name, None)
        if v is not None and not v > 0:
            raise UsageError(f"{args.command}: --{name.replace('_', '-')} must be positive, got {v}")


def validate(args) -> None:
    """All flag checks happen here, before any file is read or written."""
    cmd = args.command
    if cmd is None:
        raise UsageError("sdfclass: a subcommand is required")
    if cmd == "gen":
        _require(args, "kind", "out")
        if args.kind != "checkerboard-grid":
            _require(args, "m", "seed")
            if args.m < 2:
                raise UsageError("gen: --m must be >= 2")
        _check_positive(args, "resolution", "n", "informative")
    if cmd in ("estimate", "train", "cv", "loocv"):
        _require(args, "data")
    if cmd in ("estimate", "train", "cv"):
        _require(args, "out")
    if cmd == "train":
        _require(args, "model")
        if args.model == "kernel" and (args.sigma is None) == (args.sigma_rule is None):
            raise UsageError("train: kernel model needs exactly one of --sigma or --sigma-rule")
        if args.iterations < 0:
            raise UsageError("train: --iterations must be >= 0")
        _check_positive(args, "sigma", "gamma")
    if cmd == "loocv":
        if (args.sigma is None) == (args.sigma_rule is None):
            raise UsageError("loocv: give exactly one of --sigma or --sigma-rule")
        _check_positive(args, "sigma", "gamma")
    if cmd == "predict":
        _require(args, "model", "data")
    if cmd == "cv":
        _require(args, "sigma_grid", "seed")
        try:
            _cv_config(args)
        except ValueError as exc:
            raise UsageError(f"cv: {exc}") from None
    if cmd.startswith("bench"):
        _require(args, "seed")
        _check_positive(args, "trials", "threads")
        if cmd == "bench-linear":
            if not args.m_values or min(args.m_values) < 2:
                raise UsageError("bench-linear: --m-values must be integers >= 2")
            if not args.iterations or min(args.iterations) < 0:
                raise UsageError("bench-linear: --iterations must be integers >= 0")
            _check_positive(args, "test_size")
            if args.baseline and not args.figure_csv:
                raise UsageError("bench-linear: --baseline requires --figure-csv")
        else:
            _check_positive(args, "train_m", "resolution")
            try:
                _cv_config(args)
            except ValueError as exc:
                raise UsageError(f"bench-checkerboard: {exc}") from None


def _cv_config(args) -> CvConfig:
    rel = None if args.sigma_relative == "none" else args.sigma_relative
    stage = getattr(args, "stage", "midpoint")
    return CvConfig(args.sigma_grid, args.gamma_grid, args.folds, args.seed, stage,
                    reweight=getattr(args, "metric", "euclidean") == "correlation-weighted",
                    sigma_relative_to=rel)


def _load(args):
    return load_csv(args.data, args.label_column, args.positive_label)


def _metric(args, data) -> Metric:
    if args.metric == "correlation-weighted":
        return Metric.weighted(correlation_weights(data))
    return Metric.euclidean()


def _write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _cmd_gen(args):
    if args.kind in ("uniform", "normal", "skewed"):
        data = synthdata.gen_linear(args.kind, args.m, args.seed)
    elif args.kind == "checkerboard":
        data = synthdata.gen_checkerboard_train(args.m, args.seed)
    elif args.kind == "checkerboard-grid":
        data = synthdata.gen_checkerboard_grid(args.resolution)
    else:
        data = synthdata.gen_planted(args.m, args.n, args.informative, args.shift, args.seed)
    write_csv(args.out, data)


def _cmd_estimate(args):
    data = _load(args)
    est = estimate(data, _metric(args, data), args.stage)
    write_estimates_csv(args.out, data, est)


def _cmd_train(args):
    data = _load(args)
    metric = _metric(args, data)
    if args.model == "linear":
        model = iterate_linear(data, metric, args.iterations)
        if args.normalize:
            model = normalize(model)
    else:
        sigma = resolve_sigma(data, metric, args.sigma if args.sigma is not None else args.sigma_rule)
        b = estimate(data, metric, args.stage).b
        model = iterate_kernel(data.points, b, sigma, args.gamma, metric, args.iterations)
    _write_text(args.out, model.to_json() + "\n")


def load_model(path):
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read model {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from None
    try:
        if d.get("type") == "linear":
            return LinearModel.from_dict(d)
        if d.get("type") == "kernel":
            return KernelModel.from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: malformed model: {exc}") from None
    raise DataError(f"{path}: unknown model type {d.get('type')!r}")


def _cmd_predict(args):
    model = load_model(args.model)
    X, names = load_features_csv(args.data, exclude=(args.label_column,))
    if X.shape[1] != model.dim:
        raise DataError(f"dimension mismatch: model expects {model.dim} features, {args.data} has {X.shape[1]}")
    values = model.decision_function(X)
    with open(args.data, newline="", encoding="utf-8") as fh:
        header = [h.strip() for h in next(csv.reader(fh))]
    acc_line = None
    if args.label_column in header:
        data = load_csv(args.data, args.label_column, args.positive_label)
        acc = float(np.mean(classify(values) == data.labels))
        acc_line = f"accuracy {acc:.6f} ({data.m} samples)"
    lines = ["value,class"] + [f"{v!r},{c}" for v, c in zip(values.tolist(), classify(values).tolist())]
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    if acc_line:
        print(acc_line, file=sys.stderr)


def _cmd_cv(args):
    data = _load(args)
    res = cross_validate(data, Metric.euclidean(), _cv_config(args))
    res.to_csv(args.out)
    print(f"best sigma {res.best_sigma!r} gamma {res.best_gamma!r} accuracy {float(res.table.max()):.6f}")


def _cmd_loocv(args):
    data = _load(args)
    kind = "weighted" if args.metric == "correlation-weighted" else "euclidean"
    rule = args.sigma if args.sigma is not None else args.sigma_rule
    values, sigmas = loocv_predictions(data, kind, rule, args.gamma, args.stage)
    acc = float(np.mean(classify(values) == data.labels))
    result = {"accuracy": acc, "m": data.m, "metric": kind, "sigma_rule": rule, "gamma": args.gamma,
              "stage": args.stage, "sigma_mean": float(np.mean(sigmas)),
              "misclassified": np.flatnonzero(classify(values) != data.labels).tolist()}
    print(json.dumps(result))
    if args.out:
        _write_text(args.out, json.dumps(result, indent=2) + "\n")


def _write_reports(args, reports):
    t = sum(r.wall_time_seconds for r in reports)
    print(f"wall time {t:.1f} s", file=sys.stderr)
    if not args.record_time:
        for r in reports:
            r.wall_time_seconds = 0.0
    if args.out:
        bench.write_reports_json(args.out, reports)
        bench.write_trials_csv(os.path.splitext(args.out)[0] + ".csv", reports)
    for r in reports:
        print(f"{r.name}: mean {r.mean_accuracy:.6f} std {r.std_accuracy:.6f} "
              f"({len(r.per_trial_accuracy)} trials)")


def _cmd_bench_linear(args):
    trials = args.trials or (50 if args.full else 20)
    reports, rows = [], []
    for it in args.iterations:
        reps = bench.run_linear_suite(args.kind, args.m_values, trials, args.test_size, it, args.seed,
                                      args.threads)
        reports += reps
        rows += bench.figure_rows(reps, f"sdf-it{it}")
    if args.baseline:
        rows += bench.read_baseline_csv(args.baseline)
    _write_reports(args, reports)
    if args.figure_csv:
        bench.write_figure_csv(args.figure_csv, rows)


def _cmd_bench_checkerboard(args):
    trials = args.trials or (100 if args.full else 10)
    rep = bench.run_checkerboard_suite(args.train_m, args.resolution, trials, _cv_config(args), args.seed,
                                       args.threads)
    _write_reports(args, [rep])


COMMANDS = {
    "gen": _cmd_gen, "estimate": _cmd_estimate, "train": _cmd_train, "predict": _cmd_predict,
    "cv": _cmd_cv, "loocv": _cmd_loocv, "bench-linear": _cmd_bench_linear,
    "bench-checkerboard": _cmd_bench_checkerboard,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, sys.argv[1:] if argv is None else argv)
        validate(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except (DataError, ValueError, np.linalg.LinAlgError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
