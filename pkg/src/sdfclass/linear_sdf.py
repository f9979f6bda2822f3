"""Affine SDF models ``l(x) = w.x + c`` and the projection iteration."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, Metric
from .sdf_estimate import estimate, midpoint_shrink


class DegenerateModelError(ValueError):
    pass


@dataclass(frozen=True)
class LinearModel:
    w: np.ndarray
    c: float
    normalized: bool = False

    @property
    def dim(self) -> int:
        return self.w.shape[0]

    def decision_function(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        X = X[None, :] if X.ndim == 1 else X
        if X.shape[1] != self.dim:
            raise ValueError(f"dimension mismatch: model has dimension {self.dim}, points have {X.shape[1]}")
        return X @ self.w + self.c

    def predict(self, X) -> np.ndarray:
        return classify(self.decision_function(X))

    def to_json(self) -> str:
        return json.dumps({"type": "linear", "w": self.w.tolist(), "c": float(self.c),
                           "normalized": bool(self.normalized), "dim": self.dim})

    @classmethod
    def from_dict(cls, d: dict) -> "LinearModel":
        w = np.asarray(d["w"], dtype=float)
        if "dim" in d and int(d["dim"]) != w.shape[0]:
            raise ValueError("linear model JSON: 'dim' disagrees with len(w)")
        return cls(w, float(d["c"]), bool(d.get("normalized", False)))


def classify(values) -> np.ndarray:
    """Sign of ``values`` with 0 mapped to +1."""
    return np.where(np.asarray(values) >= 0, 1, -1)


def fit_linear(points, b) -> LinearModel:
    """Least-squares affine fit of ``b`` over ``points``.

    For an overdetermined full-rank system this is the ordinary least-squares
    solution; otherwise it is the minimum-norm solution in the joint vector
    ``(w, c)``.
    """
    X = np.asarray(points, dtype=float)
    X = X[:, None] if X.ndim == 1 else X
    b = np.asarray(b, dtype=float).ravel()
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"points must be an m x n matrix with m, n >= 1, got shape {X.shape}")
    if b.shape[0] != X.shape[0]:
        raise ValueError(f"{X.shape[0]} points but {b.shape[0]} targets")
    if not np.all(np.isfinite(b)):
        raise ValueError("targets contain non-finite values")
    A = np.hstack([X, np.ones((X.shape[0], 1))])
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    return LinearModel(sol[:-1], float(sol[-1]))


def normalize(model: LinearModel) -> LinearModel:
    """Rescale so that ``|w| = 1``; the sign of ``l(x)`` is unchanged."""
    norm = np.linalg.norm(model.w)
    if not norm > 0:
        raise DegenerateModelError("cannot normalize a model with w = 0")
    return LinearModel(model.w / norm, model.c / norm, True)


def predict_linear(model: LinearModel, x) -> float:
    x = np.asarray(x, dtype=float).ravel()
    return float(model.decision_function(x)[0])


def iterate_linear(data: Dataset, metric: Metric | None = None, iterations: int = 0) -> LinearModel:
    """Fit a linear SDF model and refine the estimates by projection.

    Starts from the midpoint-refined estimates. Each iteration replaces the
    distance to the partner point by its component along the current unit
    normal, reapplies the midpoint shrink and refits. Partners are fixed by
    the initial nearest-opposite scan.
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    est = estimate(data, metric, "midpoint")
    X = data.points
    model = fit_linear(X, est.b)
    partner = est.opposite_index
    gap = X[partner] - X
    for it in range(iterations):
        norm = np.linalg.norm(model.w)
        if not (np.isfinite(norm) and norm > 0):
            raise DegenerateModelError(f"w vanished at iteration {it}; cannot project onto the normal")
        proj = np.abs(gap @ (model.w / norm))
        b = data.labels * midpoint_shrink(proj, proj[partner])
        model = fit_linear(X, b)
    return model
