"""Seeded generators for the linear and checkerboard benchmark problems.

Every generator takes either an integer seed or a ``numpy.random.Generator``.
Multi-trial harnesses derive one independent stream per trial with
:func:`trial_rng`, so results do not depend on execution order.
"""

from __future__ import annotations

import enum

import numpy as np

from .dataset import Dataset

CHECKERBOARD_SIZE = 4


class LinearProblemKind(str, enum.Enum):
    UNIFORM = "uniform"
    NORMAL = "normal"
    SKEWED = "skewed"


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent stream for ``(seed, *key)``, e.g. ``trial_rng(seed, m, trial)``.

    Streams come from ``SeedSequence(seed, spawn_key=key)`` so two different
    keys never share state.
    """
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def skewed_from_uniform(u) -> np.ndarray:
    """Map uniform draws on [0, 1] to density ``1/(2 sqrt t)`` on [0, 1], then onto [-1, 1]."""
    return 2.0 * np.square(u) - 1.0


def _draw_linear(kind: LinearProblemKind, size: int, rng: np.random.Generator) -> np.ndarray:
    if kind is LinearProblemKind.UNIFORM:
        return rng.uniform(-1.0, 1.0, size=(size, 2))
    if kind is LinearProblemKind.NORMAL:
        return rng.standard_normal((size, 2))
    return skewed_from_uniform(rng.random((size, 2)))


def gen_linear(kind, m: int, seed) -> Dataset:
    """``m`` points in the plane labeled by the sign of the second coordinate.

    The true signed distance function of the positive class is ``x[1]``.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    kind = LinearProblemKind(kind)
    rng = as_rng(seed)
    X = _draw_linear(kind, m, rng)
    while True:
        bad = X[:, 1] == 0.0
        if not bad.any():
            break
        X[bad] = _draw_linear(kind, int(bad.sum()), rng)
    return Dataset(X, np.where(X[:, 1] > 0, 1, -1))


def linear_true_sdf(points) -> np.ndarray:
    return np.asarray(points, dtype=float)[:, 1].copy()


def checkerboard_labels(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    X = X[None, :] if X.ndim == 1 else X
    if X.shape[1] != 2:
        raise ValueError("checkerboard points are 2-dimensional")
    if np.any((X < 0) | (X >= CHECKERBOARD_SIZE)):
        raise ValueError(f"checkerboard points must lie in [0, {CHECKERBOARD_SIZE})^2")
    parity = (np.floor(X[:, 0]).astype(int) + np.floor(X[:, 1]).astype(int)) % 2
    return np.where(parity == 0, 1, -1)


def checkerboard_label(x) -> int:
    """+1 on the cell containing (0.5, 0.5) and every cell of the same colour, else -1."""
    return int(checkerboard_labels(x)[0])


def gen_checkerboard_train(m: int, seed) -> Dataset:
    if m < 2:
        raise ValueError("m must be >= 2")
    rng = as_rng(seed)
    X = rng.uniform(0.0, CHECKERBOARD_SIZE, size=(m, 2))
    while True:
        on_edge = np.any((X == np.floor(X)) & (X > 0), axis=1)
        if not on_edge.any():
            break
        X[on_edge] = rng.uniform(0.0, CHECKERBOARD_SIZE, size=(int(on_edge.sum()), 2))
    return Dataset(X, checkerboard_labels(X))


def gen_checkerboard_grid(resolution: int = 200) -> Dataset:
    """Cell-centred ``resolution x resolution`` test grid over the board."""
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    t = (np.arange(resolution) + 0.5) * (CHECKERBOARD_SIZE / resolution)
    g1, g2 = np.meshgrid(t, t, indexing="ij")
    X = np.column_stack([g1.ravel(), g2.ravel()])
    return Dataset(X, checkerboard_labels(X))


def gen_planted(m: int, n: int, informative: int, shift: float, seed) -> Dataset:
    """High-dimensional two-class Gaussian data with a few informative features.

    All features are standard normal; on the first ``informative`` features the
    positive class is shifted by ``shift`` standard deviations. Classes are
    balanced (``m // 2`` negatives) and the sample order is shuffled.
    """
    if m < 4 or informative > n:
        raise ValueError("need m >= 4 and informative <= n")
    rng = as_rng(seed)
    labels = np.ones(m, dtype=int)
    labels[: m // 2] = -1
    labels = rng.permutation(labels)
    X = rng.standard_normal((m, n))
    X[labels == 1, :informative] += shift
    return Dataset(X, labels)
