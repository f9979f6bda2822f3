"""Multi-trial experiment harness for the linear and checkerboard problems."""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dataset import Dataset
from .kernel_sdf import fit_kernel
from .linear_sdf import classify, iterate_linear
from .modelselect import CvConfig, cross_validate
from .sdf_estimate import estimate
from .synthdata import (LinearProblemKind, gen_checkerboard_grid, gen_checkerboard_train, gen_linear,
                        trial_rng)

DEFAULT_M_VALUES = (10, 30, 100, 300, 1000, 3000, 10000)
# redraws allowed when a small training sample comes out single-class
MAX_REDRAWS = 1000


def default_checkerboard_cv(seed: int = 0) -> CvConfig:
    return CvConfig(sigma_grid=(0.1, 0.15, 0.2, 0.25), gamma_grid=(1e-2, 1e-3, 1e-4), folds=5, seed=seed,
                    estimate_stage="midpoint", sigma_relative_to="mean")


@dataclass
class ExperimentReport:
    name: str
    per_trial_accuracy: list[float]
    config_echo: dict = field(default_factory=dict)
    wall_time_seconds: float = 0.0
    # per-trial extras such as the sigma/gamma chosen by cross-validation
    trial_details: list[dict] = field(default_factory=list)

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.per_trial_accuracy))

    @property
    def std_accuracy(self) -> float:
        """Sample standard deviation (divisor ``trials - 1``); 0 for a single trial."""
        if len(self.per_trial_accuracy) < 2:
            return 0.0
        return float(np.std(self.per_trial_accuracy, ddof=1))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mean_accuracy"] = self.mean_accuracy
        d["std_accuracy"] = self.std_accuracy
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(d["name"], list(d["per_trial_accuracy"]), d.get("config_echo", {}),
                   d.get("wall_time_seconds", 0.0), d.get("trial_details", []))


def accuracy(predictions, labels) -> float:
    """Fraction of samples whose prediction sign (0 counts as +1) matches the label."""
    predictions = np.asarray(predictions, dtype=float).ravel()
    labels = np.asarray(labels).ravel()
    if predictions.shape != labels.shape:
        raise ValueError(f"{predictions.shape[0]} predictions for {labels.shape[0]} labels")
    if predictions.size == 0:
        raise ValueError("no predictions")
    return float(np.mean(classify(predictions) == labels))


def run_trials(fn: Callable[[int], tuple[float, dict]], trials: int, threads: int = 1) -> list:
    """Evaluate ``fn(trial)`` for every trial; results come back in trial order."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if threads <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def _two_class(draw: Callable[[], Dataset]) -> Dataset:
    for _ in range(MAX_REDRAWS):
        data = draw()
        if np.unique(data.labels).size == 2:
            return data
    raise RuntimeError(f"no two-class training set in {MAX_REDRAWS} draws")


def linear_trial(kind, m: int, test_size: int, iterations: int, seed: int, trial: int) -> float:
    """One train/test draw of the linear problem; the stream is keyed by ``(seed, m, trial)``."""
    rng = trial_rng(seed, m, trial)
    train = _two_class(lambda: gen_linear(kind, m, rng))
    test = gen_linear(kind, test_size, rng)
    model = iterate_linear(train, None, iterations)
    return accuracy(model.decision_function(test.points), test.labels)


def run_linear_suite(kind, m_values: Sequence[int] = DEFAULT_M_VALUES, trials: int = 50,
                     test_size: int = 4000, iterations: int = 5, seed: int = 0,
                     threads: int = 1) -> list[ExperimentReport]:
    """One report per training-set size ``m``."""
    kind = LinearProblemKind(kind)
    reports = []
    for m in m_values:
        t0 = time.perf_counter()
        accs = run_trials(lambda t: linear_trial(kind, m, test_size, iterations, seed, t), trials, threads)
        reports.append(ExperimentReport(
            name=f"linear-{kind.value}-m{m}-it{iterations}",
            per_trial_accuracy=[float(a) for a in accs],
            config_echo={"suite": "linear", "kind": kind.value, "m": int(m), "trials": trials,
                         "test_size": test_size, "iterations": iterations, "seed": seed},
            wall_time_seconds=time.perf_counter() - t0))
    return reports


def checkerboard_trial(train_m: int, grid: Dataset, cv: CvConfig, seed: int, trial: int) -> tuple[float, dict]:
    train = gen_checkerboard_train(train_m, trial_rng(seed, trial))
    res = cross_validate(train, None, cv)
    b = estimate(train, None, cv.estimate_stage).b
    model = fit_kernel(train.points, b, res.best_sigma, res.best_gamma)
    acc = accuracy(model.decision_function(grid.points), grid.labels)
    return acc, {"sigma": res.best_sigma, "gamma": res.best_gamma, "cv_accuracy": float(res.table.max())}


def run_checkerboard_suite(train_m: int = 1000, grid_resolution: int = 200, trials: int = 10,
                           cv: CvConfig | None = None, seed: int = 0, threads: int = 1) -> ExperimentReport:
    """Fresh training set per trial, hyperparameters by CV on it, scored on the fixed grid."""
    cv = cv or default_checkerboard_cv(seed)
    grid = gen_checkerboard_grid(grid_resolution)
    t0 = time.perf_counter()
    out = run_trials(lambda t: checkerboard_trial(train_m, grid, cv, seed, t), trials, threads)
    return ExperimentReport(
        name=f"checkerboard-m{train_m}",
        per_trial_accuracy=[float(a) for a, _ in out],
        config_echo={"suite": "checkerboard", "train_m": train_m, "grid_resolution": grid_resolution,
                     "trials": trials, "seed": seed, "cv": cv.to_dict()},
        wall_time_seconds=time.perf_counter() - t0,
        trial_details=[d for _, d in out])


def write_trials_csv(path, reports: Sequence[ExperimentReport]) -> None:
    """One row per trial: report name, trial index, accuracy."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name", "trial", "accuracy"])
        for rep in reports:
            for t, a in enumerate(rep.per_trial_accuracy):
                w.writerow([rep.name, t, repr(float(a))])


def write_reports_json(path, reports: Sequence[ExperimentReport]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([r.to_dict() for r in reports], fh, indent=2)
        fh.write("\n")


def figure_rows(reports: Sequence[ExperimentReport], variant: str) -> list[dict]:
    """Rows of ``log10(m)`` against mean accuracy for linear-suite reports."""
    return [{"variant": variant, "m": r.config_echo["m"], "log10_m": math.log10(r.config_echo["m"]),
             "mean_accuracy": r.mean_accuracy, "std_accuracy": r.std_accuracy} for r in reports]


def read_baseline_csv(path) -> list[dict]:
    """Externally produced results with columns ``variant, m, mean_accuracy`` (extra columns kept)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    missing = {"variant", "m", "mean_accuracy"} - set(rows[0] if rows else {})
    if missing:
        raise ValueError(f"{path}: baseline CSV lacks columns {sorted(missing)}")
    return [{**r, "m": int(r["m"]), "log10_m": math.log10(int(r["m"])),
             "mean_accuracy": float(r["mean_accuracy"])} for r in rows]


def write_figure_csv(path, rows: Sequence[dict]) -> None:
    """Plot-ready table, sorted by variant then ``m``; baseline rows may be mixed in."""
    cols = ["variant", "m", "log10_m", "mean_accuracy", "std_accuracy"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in sorted(rows, key=lambda r: (r["variant"], r["m"])):
            w.writerow([r.get(c, "") if not isinstance(r.get(c), float) else repr(r[c]) for c in cols])
