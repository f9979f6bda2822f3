"""Signed distance estimates at the training points, from labels alone."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import DataError, Dataset, Metric, pairwise_distances, write_csv

INITIAL = "initial"
MIDPOINT = "midpoint"

# rows per block in the nearest-opposite scan; keeps the block of
# distances around a few million entries
_BLOCK_ELEMS = 4_000_000


@dataclass(frozen=True)
class SdfEstimates:
    """Per-point signed distance estimates.

    ``b[i]`` carries the sign of ``labels[i]``; ``opposite_index[i]`` is the
    nearest training point of the other class.
    """

    b: np.ndarray
    opposite_index: np.ndarray
    stage: str = INITIAL


def initial_estimates(data: Dataset, metric: Metric | None = None) -> SdfEstimates:
    """Signed distance from each point to the nearest point of the other class.

    Ties go to the lowest index. Raises :class:`DataError` for single-class
    data or when two points of opposite labels coincide.
    """
    metric = metric or Metric.euclidean()
    labels = data.labels
    pos = np.flatnonzero(labels == 1)
    neg = np.flatnonzero(labels == -1)
    if pos.size == 0:
        raise DataError("no opposite-class point: class +1 is missing")
    if neg.size == 0:
        raise DataError("no opposite-class point: class -1 is missing")

    b = np.empty(data.m)
    opp = np.empty(data.m, dtype=np.intp)
    for own, other in ((pos, neg), (neg, pos)):
        Y = data.points[other]
        step = max(1, _BLOCK_ELEMS // max(1, other.size))
        for start in range(0, own.size, step):
            rows = own[start:start + step]
            D = pairwise_distances(metric, data.points[rows], Y)
            # ``other`` is sorted, so argmin's first-hit rule is lowest-index tie-breaking
            k = np.argmin(D, axis=1)
            b[rows] = D[np.arange(rows.size), k]
            opp[rows] = other[k]
    if np.any(b == 0):
        i = int(np.flatnonzero(b == 0)[0])
        raise DataError(f"coincident opposite-label points: samples {i} and {int(opp[i])}")
    b *= labels
    return SdfEstimates(b, opp, INITIAL)


def midpoint_shrink(magnitude: np.ndarray, partner: np.ndarray) -> np.ndarray:
    """``|b| - |c|/2`` with the partner deduction capped at ``|b|``.

    The cap only matters when ``|c| > |b|``, which cannot happen for
    nearest-opposite estimates but can after projection.
    """
    magnitude = np.abs(magnitude)
    return magnitude - 0.5 * np.minimum(np.abs(partner), magnitude)


def midpoint_refine(est: SdfEstimates) -> SdfEstimates:
    """Place the boundary halfway between each point and its partner.

    ``b'_i = sign(b_i) * (|b_i| - |c_i| / 2)`` where ``c_i`` is the estimate at
    the partner point ``opposite_index[i]``. A mutual-nearest pair therefore
    ends up at half its separation.
    """
    if est.stage != INITIAL:
        raise ValueError(f"midpoint_refine expects initial estimates, got stage {est.stage!r}")
    c = est.b[est.opposite_index]
    refined = np.sign(est.b) * midpoint_shrink(est.b, c)
    return SdfEstimates(refined, est.opposite_index.copy(), MIDPOINT)


def estimate(data: Dataset, metric: Metric | None = None, stage: str = MIDPOINT) -> SdfEstimates:
    """Initial estimates, optionally followed by the midpoint refinement."""
    est = initial_estimates(data, metric)
    if stage == INITIAL:
        return est
    if stage == MIDPOINT:
        return midpoint_refine(est)
    raise ValueError(f"unknown estimate stage {stage!r}; expected 'initial' or 'midpoint'")


def write_estimates_csv(path, data: Dataset, est: SdfEstimates) -> None:
    write_csv(path, data, {"b": est.b, "opposite_index": est.opposite_index})
