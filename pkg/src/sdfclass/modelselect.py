"""Choosing the kernel width and smoothing parameter; leave-one-out evaluation."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial.distance import squareform

from .dataset import (DataError, Dataset, Metric, condensed_distances, correlation_weights,
                      interdistance_stat, pairwise_distances)
from .kernel_sdf import DEFAULT_GAMMA, gaussian, gram_from_sqdist, solve_ridge
from .linear_sdf import classify
from .sdf_estimate import MIDPOINT, estimate
from .synthdata import as_rng

LEAVE_ONE_OUT = "loo"


def sigma_heuristic(data: Dataset, metric: Metric | None = None, kind: str = "mean") -> float:
    """Kernel width from the mean (``"mean"``) or RMS (``"rmsd"``) pairwise distance."""
    return interdistance_stat(data, metric or Metric.euclidean(), kind)


@dataclass(frozen=True)
class CvConfig:
    """Grid search settings.

    With ``sigma_relative_to`` set to ``"mean"`` or ``"rmsd"``, ``sigma_grid``
    holds multipliers of that heuristic, evaluated on each fold's training
    part; otherwise it holds absolute widths.
    """

    sigma_grid: Sequence[float]
    gamma_grid: Sequence[float] = (DEFAULT_GAMMA,)
    folds: int | str = 5
    seed: int = 0
    estimate_stage: str = MIDPOINT
    reweight: bool = False
    sigma_relative_to: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "sigma_grid", tuple(float(s) for s in self.sigma_grid))
        object.__setattr__(self, "gamma_grid", tuple(float(g) for g in self.gamma_grid))
        if not self.sigma_grid or not self.gamma_grid:
            raise ValueError("sigma and gamma grids must be non-empty")
        if any(not v > 0 for v in self.sigma_grid + self.gamma_grid):
            raise ValueError("grid values must be positive")
        if self.folds != LEAVE_ONE_OUT and (not isinstance(self.folds, int) or self.folds < 2):
            raise ValueError("folds must be an integer >= 2 or 'loo'")
        if self.sigma_relative_to not in (None, "mean", "rmsd"):
            raise ValueError("sigma_relative_to must be None, 'mean' or 'rmsd'")

    def to_dict(self) -> dict:
        return {"sigma_grid": list(self.sigma_grid), "gamma_grid": list(self.gamma_grid),
                "folds": self.folds, "seed": self.seed, "estimate_stage": self.estimate_stage,
                "reweight": self.reweight, "sigma_relative_to": self.sigma_relative_to}


@dataclass
class CvResult:
    best_sigma: float
    best_gamma: float
    table: np.ndarray
    sigma_grid: tuple[float, ...]
    gamma_grid: tuple[float, ...]
    fold_assignments: np.ndarray = field(repr=False)
    # multiplier that produced best_sigma when the grid is relative
    best_sigma_factor: float | None = None

    def to_csv(self, path) -> None:
        """Rows are sigma values, columns gamma values, cells mean held-out accuracy."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sigma"] + [repr(g) for g in self.gamma_grid])
            for s, row in zip(self.sigma_grid, self.table):
                w.writerow([repr(s)] + [repr(float(v)) for v in row])


def stratified_folds(labels, k: int, seed) -> np.ndarray:
    """Fold index per sample; each class is shuffled then dealt round-robin.

    Folds are disjoint, cover every sample and differ in size by at most one.
    """
    labels = np.asarray(labels)
    m = labels.shape[0]
    if k > m:
        raise ValueError(f"{k} folds requested for {m} samples")
    rng = as_rng(seed)
    order = np.concatenate([rng.permutation(np.flatnonzero(labels == cls)) for cls in (-1, 1)])
    folds = np.empty(m, dtype=np.intp)
    folds[order] = np.arange(m) % k
    return folds


def best_cell(table: np.ndarray, sigma_grid, gamma_grid) -> tuple[int, int]:
    """Index of the maximal cell; ties go to the smallest sigma, then smallest gamma."""
    sig_order = np.argsort(np.asarray(sigma_grid), kind="stable")
    gam_order = np.argsort(np.asarray(gamma_grid), kind="stable")
    sub = np.asarray(table)[np.ix_(sig_order, gam_order)]
    i, j = np.unravel_index(np.argmax(sub), sub.shape)
    return int(sig_order[i]), int(gam_order[j])


def _metric_for(train: Dataset, base: Metric, reweight: bool) -> Metric:
    if not reweight:
        return base
    return Metric.weighted(correlation_weights(train))


def cross_validate(data: Dataset, metric: Metric | None, config: CvConfig) -> CvResult:
    """Grid search over ``(sigma, gamma)`` scored by held-out accuracy.

    Estimates, optional correlation weights and relative sigma scales are all
    computed from each fold's training part only.
    """
    metric = metric or Metric.euclidean()
    counts = [int(np.sum(data.labels == c)) for c in (-1, 1)]
    k = data.m if config.folds == LEAVE_ONE_OUT else config.folds
    if min(counts) < 2:
        raise DataError(f"cannot stratify: class sizes {counts} (each class needs >= 2 samples)")
    if k > data.m:
        raise DataError(f"{k} folds requested for {data.m} samples")
    folds = stratified_folds(data.labels, k, config.seed)

    sigmas = np.array(config.sigma_grid)
    gammas = np.array(config.gamma_grid)
    correct = np.zeros((sigmas.size, gammas.size))
    for f in range(k):
        test = folds == f
        train = data.subset(~test)
        if np.unique(train.labels).size < 2:
            raise DataError(f"fold {f}: training part lost a class")
        met = _metric_for(train, metric, config.reweight)
        b = estimate(train, met, config.estimate_stage).b
        sq_train = squareform(condensed_distances(met, train.points, squared=True))
        sq_test = pairwise_distances(met, data.points[test], train.points, squared=True)
        scale = 1.0
        if config.sigma_relative_to is not None:
            scale = sigma_heuristic(train, met, config.sigma_relative_to)
        y = data.labels[test]
        for i, s in enumerate(sigmas * scale):
            K = gram_from_sqdist(sq_train, s)
            Kt = gaussian(sq_test, s)
            for j, g in enumerate(gammas):
                c = solve_ridge(K, b, g)
                correct[i, j] += np.sum(classify(Kt @ c) == y)
    table = correct / data.m
    i, j = best_cell(table, sigmas, gammas)
    factor = float(sigmas[i]) if config.sigma_relative_to is not None else None
    best_sigma = float(sigmas[i])
    if config.sigma_relative_to is not None:
        best_sigma = float(sigmas[i]) * sigma_heuristic(data, _metric_for(data, metric, config.reweight),
                                                        config.sigma_relative_to)
    return CvResult(best_sigma, float(gammas[j]), table, tuple(config.sigma_grid), tuple(config.gamma_grid),
                    folds, factor)


def resolve_sigma(data: Dataset, metric: Metric, sigma_rule) -> float:
    """``sigma_rule`` is a positive number or one of ``"mean"``, ``"rmsd"``."""
    if isinstance(sigma_rule, str):
        return sigma_heuristic(data, metric, sigma_rule)
    sigma = float(sigma_rule)
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return sigma


def loocv_predictions(data: Dataset, metric_kind: str = "weighted", sigma_rule="mean",
                      gamma: float = DEFAULT_GAMMA, estimate_stage: str = MIDPOINT):
    """Held-out decision values and the sigma used for each left-out sample.

    For every ``i`` the correlation weights (``metric_kind="weighted"``), the
    kernel width and the SDF estimates are recomputed on the data without
    sample ``i``.
    """
    if metric_kind not in ("euclidean", "weighted"):
        raise ValueError(f"unknown metric kind {metric_kind!r}")
    if data.m < 3:
        raise DataError("LOOCV needs at least 3 samples")
    counts = [int(np.sum(data.labels == c)) for c in (-1, 1)]
    if min(counts) < 2:
        raise DataError(f"LOOCV needs >= 2 samples per class, got class sizes {counts}")
    values = np.empty(data.m)
    sigmas = np.empty(data.m)
    for i in range(data.m):
        train = data.without(i)
        met = _metric_for(train, Metric.euclidean(), metric_kind == "weighted")
        sigma = resolve_sigma(train, met, sigma_rule)
        b = estimate(train, met, estimate_stage).b
        sq = squareform(condensed_distances(met, train.points, squared=True))
        c = solve_ridge(gram_from_sqdist(sq, sigma), b, gamma)
        sq_i = pairwise_distances(met, data.points[i], train.points, squared=True)
        values[i] = float(gaussian(sq_i, sigma)[0] @ c)
        sigmas[i] = sigma
    return values, sigmas


def loocv(data: Dataset, metric_kind: str = "weighted", sigma_rule="mean",
          gamma: float = DEFAULT_GAMMA, estimate_stage: str = MIDPOINT) -> float:
    """Leave-one-out accuracy of the kernel SDF classifier."""
    values, _ = loocv_predictions(data, metric_kind, sigma_rule, gamma, estimate_stage)
    return float(np.mean(classify(values) == data.labels))
