"""Gaussian-kernel ridge regression of SDF estimates."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack
from scipy.spatial.distance import squareform

from .dataset import Metric, condensed_distances, pairwise_distances
from .linear_sdf import classify

DEFAULT_GAMMA = 1e-7
RESIDUAL_TOL = 1e-8

# query rows per block in batch prediction
_PREDICT_BLOCK = 4096


class FactorizationError(np.linalg.LinAlgError):
    def __init__(self, pivot: int, m: int):
        super().__init__(f"Cholesky factorization of K + m*gamma*I failed at pivot {pivot} of {m}: "
                         f"leading minor not positive definite (sigma/gamma too extreme?)")
        self.pivot = pivot


def _check_sigma(sigma: float) -> None:
    if not (np.isfinite(sigma) and sigma > 0):
        raise ValueError(f"sigma must be positive and finite, got {sigma}")


def gaussian(sq_dist, sigma: float) -> np.ndarray:
    return np.exp(-np.asarray(sq_dist) / (2.0 * sigma * sigma))


def gram(points, sigma: float, metric: Metric | None = None) -> np.ndarray:
    """Gaussian Gram matrix ``K_ij = exp(-d(x_i, x_j)^2 / (2 sigma^2))``.

    Each unordered pair is evaluated once, so the result is exactly symmetric.
    """
    _check_sigma(sigma)
    metric = metric or Metric.euclidean()
    X = np.asarray(points, dtype=float)
    X = X[:, None] if X.ndim == 1 else X
    return gram_from_sqdist(squareform(condensed_distances(metric, X, squared=True)), sigma)


def gram_from_sqdist(sq: np.ndarray, sigma: float) -> np.ndarray:
    _check_sigma(sigma)
    K = gaussian(sq, sigma)
    np.fill_diagonal(K, 1.0)
    return K


def solve_ridge(K: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """Solve ``(K + m*gamma*I) c = b`` by Cholesky with residual refinement."""
    if not (np.isfinite(gamma) and gamma > 0):
        raise ValueError(f"gamma must be positive and finite, got {gamma}")
    m = K.shape[0]
    A = K + (m * gamma) * np.eye(m)
    L, info = lapack.dpotrf(A, lower=1, clean=1)
    if info > 0:
        raise FactorizationError(info, m)
    if info < 0:
        raise ValueError(f"dpotrf: illegal argument {-info}")

    def cho_solve(rhs):
        x, inf = lapack.dpotrs(L, rhs, lower=1)
        if inf != 0:
            raise ValueError(f"dpotrs: illegal argument {-inf}")
        return x

    c = cho_solve(b)
    bnorm = np.linalg.norm(b)
    for _ in range(3):
        r = b - A @ c
        if np.linalg.norm(r) <= RESIDUAL_TOL * bnorm:
            return c
        c = c + cho_solve(r)
    rel = np.linalg.norm(b - A @ c) / bnorm
    if rel > RESIDUAL_TOL:
        warnings.warn(f"kernel ridge solve: relative residual {rel:.2e} exceeds {RESIDUAL_TOL:g} "
                      f"(m={m}, gamma={gamma:g}); system is ill-conditioned", RuntimeWarning, stacklevel=3)
    return c


@dataclass(frozen=True)
class KernelModel:
    """``B(x) = sum_i coeffs[i] * K(support_points[i], x)``."""

    support_points: np.ndarray
    coeffs: np.ndarray
    sigma: float
    gamma: float
    metric: Metric

    @property
    def dim(self) -> int:
        return self.support_points.shape[1]

    def decision_function(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        X = X[None, :] if X.ndim == 1 else X
        if X.shape[1] != self.dim:
            raise ValueError(f"dimension mismatch: model has dimension {self.dim}, points have {X.shape[1]}")
        out = np.empty(X.shape[0])
        for start in range(0, X.shape[0], _PREDICT_BLOCK):
            sq = pairwise_distances(self.metric, X[start:start + _PREDICT_BLOCK], self.support_points, squared=True)
            out[start:start + _PREDICT_BLOCK] = gaussian(sq, self.sigma) @ self.coeffs
        return out

    def predict(self, X) -> np.ndarray:
        return classify(self.decision_function(X))

    def to_json(self) -> str:
        return json.dumps({"type": "kernel", "sigma": self.sigma, "gamma": self.gamma,
                           "metric": self.metric.to_dict(), "support": self.support_points.tolist(),
                           "coeffs": self.coeffs.tolist(), "dim": self.dim})

    @classmethod
    def from_dict(cls, d: dict) -> "KernelModel":
        support = np.asarray(d["support"], dtype=float)
        if support.ndim != 2:
            raise ValueError("kernel model JSON: 'support' must be a list of points")
        if "dim" in d and int(d["dim"]) != support.shape[1]:
            raise ValueError("kernel model JSON: 'dim' disagrees with the support points")
        return cls(support, np.asarray(d["coeffs"], dtype=float), float(d["sigma"]), float(d["gamma"]),
                   Metric.from_dict(d.get("metric", {"kind": "euclidean"})))


def _prep(points, b):
    X = np.array(points, dtype=float)
    X = X[:, None] if X.ndim == 1 else X
    b = np.array(b, dtype=float).ravel()
    if X.shape[0] < 1:
        raise ValueError("need at least one point")
    if b.shape[0] != X.shape[0]:
        raise ValueError(f"{X.shape[0]} points but {b.shape[0]} targets")
    return X, b


def fit_kernel(points, b, sigma: float, gamma: float = DEFAULT_GAMMA,
               metric: Metric | None = None) -> KernelModel:
    """Solve ``(K + m*gamma*I) c = b`` for the expansion coefficients."""
    metric = metric or Metric.euclidean()
    X, b = _prep(points, b)
    K = gram(X, sigma, metric)
    return KernelModel(X, solve_ridge(K, b, gamma), float(sigma), float(gamma), metric)


def predict_kernel(model: KernelModel, x) -> float:
    x = np.asarray(x, dtype=float).ravel()
    return float(model.decision_function(x)[0])


def iterate_kernel(points, b0, sigma: float, gamma: float = DEFAULT_GAMMA,
                   metric: Metric | None = None, iterations: int = 0) -> KernelModel:
    """Refit ``iterations`` times, each time on the previous model's values at the training points."""
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    metric = metric or Metric.euclidean()
    X, b = _prep(points, b0)
    K = gram(X, sigma, metric)
    c = solve_ridge(K, b, gamma)
    for _ in range(iterations):
        b = K @ c
        c = solve_ridge(K, b, gamma)
    return KernelModel(X, c, float(sigma), float(gamma), metric)
