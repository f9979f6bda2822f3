"""Labeled point sets, distance metrics and CSV I/O."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist, pdist


class DataError(ValueError):
    """Raised when input data violates a contract (bad file, bad labels, ...)."""


@dataclass(frozen=True)
class Dataset:
    """``m`` points in ``R^n`` with labels in {-1, +1}.

    ``feature_names`` is carried along so that CSV write-back preserves the
    header of the file the data came from.
    """

    points: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        labels = np.array(self.labels)
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise DataError(f"points must be an m x n matrix with m, n >= 1, got shape {points.shape}")
        if labels.shape != (points.shape[0],):
            raise DataError(f"expected {points.shape[0]} labels, got shape {labels.shape}")
        if not np.all(np.isfinite(points)):
            raise DataError("points contain non-finite values")
        if not np.all((labels == 1) | (labels == -1)):
            raise DataError("every label must be exactly -1 or +1")
        if self.feature_names is not None and len(self.feature_names) != points.shape[1]:
            raise DataError("feature_names length does not match the number of columns")
        points.setflags(write=False)
        labels = labels.astype(np.int8)
        labels.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def subset(self, index) -> "Dataset":
        return Dataset(self.points[index], self.labels[index], self.feature_names)

    def without(self, i: int) -> "Dataset":
        """Copy of the data with sample ``i`` removed."""
        keep = np.ones(self.m, dtype=bool)
        keep[i] = False
        return self.subset(keep)


@dataclass(frozen=True)
class Metric:
    """Euclidean distance, optionally with per-coordinate weights.

    The weighted distance is ``sqrt(sum_k a_k**2 * (x_k - y_k)**2)``.
    """

    kind: str = "euclidean"
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("euclidean", "weighted"):
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.kind == "euclidean":
            if self.weights is not None:
                raise ValueError("euclidean metric takes no weights")
            return
        if self.weights is None:
            raise ValueError("weighted metric requires weights")
        a = np.array(self.weights, dtype=float).ravel()
        if not np.all(np.isfinite(a)) or np.any(a < 0) or not np.any(a > 0):
            raise ValueError("weights must be finite, nonnegative, and not all zero")
        a.setflags(write=False)
        object.__setattr__(self, "weights", a)

    @classmethod
    def euclidean(cls) -> "Metric":
        return cls("euclidean")

    @classmethod
    def weighted(cls, weights) -> "Metric":
        return cls("weighted", weights)

    def _cdist_kwargs(self, n: int) -> dict:
        if self.weights is None:
            return {}
        if self.weights.shape[0] != n:
            raise ValueError(f"metric has {self.weights.shape[0]} weights but points have dimension {n}")
        return {"w": self.weights ** 2}

    def to_dict(self) -> dict:
        if self.weights is None:
            return {"kind": "euclidean"}
        return {"kind": "weighted", "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Metric":
        if d.get("kind") == "weighted":
            return cls.weighted(d["weights"])
        return cls.euclidean()

    def __eq__(self, other):
        if not isinstance(other, Metric):
            return NotImplemented
        if self.kind != other.kind:
            return False
        return self.weights is None or np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash((self.kind, None if self.weights is None else self.weights.tobytes()))


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return X[None, :] if X.ndim == 1 else X


def pairwise_distances(metric: Metric, X, Y=None, squared: bool = False) -> np.ndarray:
    """Distance matrix between rows of ``X`` and rows of ``Y`` (default ``X``)."""
    X = _as_matrix(X)
    Y = X if Y is None else _as_matrix(Y)
    if X.shape[1] != Y.shape[1]:
        raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    kind = "sqeuclidean" if squared else "euclidean"
    return cdist(X, Y, kind, **metric._cdist_kwargs(X.shape[1]))


def condensed_distances(metric: Metric, X, squared: bool = False) -> np.ndarray:
    """Distances over unordered pairs ``i < j`` in :func:`scipy.spatial.distance.pdist` order."""
    X = _as_matrix(X)
    kind = "sqeuclidean" if squared else "euclidean"
    return pdist(X, kind, **metric._cdist_kwargs(X.shape[1]))


def distance(metric: Metric, x, y) -> float:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    return float(pairwise_distances(metric, x, y)[0, 0])


def correlation_weights(data: Dataset) -> np.ndarray:
    """Absolute Pearson correlation of each feature column with the labels.

    Columns with zero variance get weight 0.
    """
    if data.m < 2:
        raise DataError("correlation weights need at least two samples")
    y = data.labels.astype(float)
    if np.all(y == y[0]):
        raise DataError("correlation weights need both classes present")
    Xc = data.points - data.points.mean(axis=0)
    yc = y - y.mean()
    cov = yc @ Xc
    sx = np.sqrt(np.einsum("ij,ij->j", Xc, Xc))
    sy = math.sqrt(yc @ yc)
    # relative tolerance so that columns constant up to rounding count as constant
    scale = np.abs(data.points).max(axis=0)
    degenerate = sx <= 1e-12 * np.maximum(scale, 1e-300) * math.sqrt(data.m)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(degenerate, 0.0, np.abs(cov) / (np.where(degenerate, 1.0, sx) * sy))
    return np.clip(r, 0.0, 1.0)


def interdistance_stat(data: Dataset, metric: Metric, kind: str = "mean") -> float:
    """Mean or root-mean-square distance over all pairs ``i < j``."""
    if data.m < 2:
        raise DataError("inter-point distance statistics need at least two points")
    kind = kind.lower()
    if kind == "mean":
        return float(np.mean(condensed_distances(metric, data.points)))
    if kind == "rmsd":
        return float(np.sqrt(np.mean(condensed_distances(metric, data.points, squared=True))))
    raise ValueError(f"unknown statistic {kind!r}; expected 'mean' or 'rmsd'")


def load_csv(path, label_column: str | int, positive_label: str) -> Dataset:
    """Read a header-led CSV file into a :class:`Dataset`.

    ``label_column`` is a header name or a 0-based column index. Rows whose
    label equals ``positive_label`` get +1, the other label gets -1; every
    other column must be numeric.
    """
    if not os.path.isfile(path):
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise DataError(f"{path}: no data rows")

    if isinstance(label_column, int) or (isinstance(label_column, str) and label_column.lstrip("-").isdigit()
                                         and label_column not in header):
        col = int(label_column)
        if not -len(header) <= col < len(header):
            raise DataError(f"{path}: label column index {col} out of range")
        col %= len(header)
    else:
        if label_column not in header:
            raise DataError(f"{path}: no column named {label_column!r}")
        col = header.index(label_column)

    feature_cols = [k for k in range(len(header)) if k != col]
    if not feature_cols:
        raise DataError(f"{path}: no feature columns")
    points = np.empty((len(body), len(feature_cols)))
    raw_labels = []
    for r, row in enumerate(body):
        line = r + 2
        if len(row) != len(header):
            raise DataError(f"{path}: row {line} has {len(row)} fields, header has {len(header)}")
        raw_labels.append(row[col].strip())
        for j, k in enumerate(feature_cols):
            cell = row[k].strip()
            try:
                points[r, j] = float(cell)
            except ValueError:
                raise DataError(f"{path}: non-numeric value {cell!r} at row {line}, column {header[k]!r}") from None

    values = sorted(set(raw_labels))
    if len(values) != 2:
        raise DataError(f"{path}: label column {header[col]!r} is not binary "
                        f"({len(values)} distinct values: {values[:5]})")
    if positive_label not in values:
        raise DataError(f"{path}: positive label {positive_label!r} not among labels {values}")
    labels = np.where(np.array(raw_labels) == positive_label, 1, -1)
    try:
        return Dataset(points, labels, tuple(header[k] for k in feature_cols))
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def _fmt(v: float) -> str:
    return repr(float(v))


def write_csv(path, data: Dataset, extra_columns: dict[str, Sequence] | None = None,
              label_name: str = "label") -> None:
    """Write ``data`` with a trailing label column (``1`` / ``-1``).

    Floats are written with ``repr`` so that :func:`load_csv` reads back the
    identical values. ``extra_columns`` are appended after the label.
    """
    names = list(data.feature_names or (f"x{k}" for k in range(data.n)))
    extra = extra_columns or {}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + [label_name] + list(extra))
        for i in range(data.m):
            row = [_fmt(v) for v in data.points[i]] + [str(int(data.labels[i]))]
            for col in extra.values():
                v = col[i]
                row.append(str(v) if isinstance(v, (int, np.integer)) else _fmt(v))
            w.writerow(row)


def load_features_csv(path, exclude: Sequence[str] = ()) -> tuple[np.ndarray, list[str]]:
    """Numeric matrix from a header-led CSV, skipping the columns named in ``exclude``."""
    if not os.path.isfile(path):
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if len(rows) < 2:
        raise DataError(f"{path}: no data rows")
    header = [h.strip() for h in rows[0]]
    cols = [k for k, h in enumerate(header) if h not in exclude]
    X = np.empty((len(rows) - 1, len(cols)))
    for r, row in enumerate(rows[1:]):
        if len(row) != len(header):
            raise DataError(f"{path}: row {r + 2} has {len(row)} fields, header has {len(header)}")
        for j, k in enumerate(cols):
            try:
                X[r, j] = float(row[k])
            except ValueError:
                raise DataError(f"{path}: non-numeric value {row[k]!r} at row {r + 2}, column {header[k]!r}") from None
    if not np.all(np.isfinite(X)):
        raise DataError(f"{path}: non-finite feature values")
    return X, [header[k] for k in cols]
