"""Lock-step and elastic distances between multivariate series.

The Euclidean distance between two series is the sum over dimensions of the
per-dimension Euclidean norms (a sum of per-dimension norms, not one global
norm). Dynamic time warping is computed over squared point differences with
a Sakoe-Chiba band and a final square root on the accumulated sum, so a
zero-width band on univariate equal-length series gives exactly the
Euclidean distance. Multivariate warping comes in two flavours: dependent
(all dimensions aligned jointly) and independent (per-dimension warping,
summed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .data import TimeSeriesInstance
from .errors import ShapeMismatchError

__all__ = [
    "WarpingWindow",
    "euclidean_distance",
    "dtw_dependent",
    "dtw_independent",
]


@dataclass(frozen=True)
class WarpingWindow:
    """Sakoe-Chiba band constraint ``|i - k| <= floor(fraction * L)``.

    ``fraction=0.0`` restricts the path to the diagonal, ``fraction=1.0`` is
    unconstrained. The benchmark default is 0.1. The band half-width is
    rounded down; the rounding convention matters for short series and is
    pinned here.
    """

    fraction: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError(f"fraction must be in [0, 1], got {self.fraction}")

    def resolved_width(self, length: int) -> int:
        return math.floor(self.fraction * length)


FULL_WINDOW = WarpingWindow(1.0)


@njit(cache=True)
def _dtw_banded_sq(p, q, band, threshold_sq):
    """Banded DP over squared point costs; returns the accumulated cost.

    p, q: (D, L) float64. Returns inf if every cell of some row exceeds
    threshold_sq (early abandon); path costs only grow, so this cannot
    change which distances fall at or below the threshold.
    """
    n_dims, length = p.shape
    prev = np.full(length, np.inf)
    cur = np.full(length, np.inf)
    for i in range(length):
        lo = i - band
        if lo < 0:
            lo = 0
        hi = i + band
        if hi > length - 1:
            hi = length - 1
        cur[:] = np.inf
        row_min = np.inf
        for k in range(lo, hi + 1):
            cost = 0.0
            for d in range(n_dims):
                diff = p[d, i] - q[d, k]
                cost += diff * diff
            if i == 0 and k == 0:
                best = 0.0
            else:
                best = np.inf
                if i > 0 and prev[k] < best:
                    best = prev[k]
                if k > 0 and cur[k - 1] < best:
                    best = cur[k - 1]
                if i > 0 and k > 0 and prev[k - 1] < best:
                    best = prev[k - 1]
            total = cost + best
            cur[k] = total
            if total < row_min:
                row_min = total
        if row_min > threshold_sq:
            return np.inf
        prev, cur = cur, prev
    return prev[length - 1]


def _check_compatible(p: TimeSeriesInstance, q: TimeSeriesInstance) -> None:
    if p.n_dimensions != q.n_dimensions:
        raise ShapeMismatchError(
            f"dimension counts differ: {p.n_dimensions} vs {q.n_dimensions}"
        )
    if p.lengths != q.lengths:
        raise ShapeMismatchError(f"per-dimension lengths differ: {p.lengths} vs {q.lengths}")


def euclidean_distance(p: TimeSeriesInstance, q: TimeSeriesInstance) -> float:
    """Sum over dimensions of the per-dimension Euclidean norm."""
    _check_compatible(p, q)
    total = 0.0
    for dp, dq in zip(p.dimensions, q.dimensions):
        diff = dp - dq
        total += math.sqrt(float(np.dot(diff, diff)))
    return total


def dtw_dependent(
    p: TimeSeriesInstance,
    q: TimeSeriesInstance,
    window: WarpingWindow = WarpingWindow(),
    threshold: float = math.inf,
) -> float:
    """Multivariate DTW aligning all dimensions jointly.

    Point cost at (i, k) is the squared difference summed over dimensions;
    the returned value is the square root of the accumulated minimum.
    Requires a single common length across dimensions. A finite
    ``threshold`` enables early abandoning: distances not exceeding the
    threshold are always exact, larger ones may be reported as inf.
    """
    _check_compatible(p, q)
    if len(set(p.lengths)) != 1:
        raise ShapeMismatchError(
            f"dependent warping needs one common length, got {p.lengths}; "
            "use dtw_independent for ragged dimensions"
        )
    stack_p = np.ascontiguousarray(np.vstack(p.dimensions))
    stack_q = np.ascontiguousarray(np.vstack(q.dimensions))
    band = window.resolved_width(stack_p.shape[1])
    acc = _dtw_banded_sq(stack_p, stack_q, band, threshold * threshold)
    return math.sqrt(acc) if math.isfinite(acc) else math.inf


def dtw_independent(
    p: TimeSeriesInstance,
    q: TimeSeriesInstance,
    window: WarpingWindow = WarpingWindow(),
    threshold: float = math.inf,
) -> float:
    """Sum of univariate DTW distances, one per dimension.

    Each dimension warps on its own band resolved from that dimension's
    length, so ragged dimensions are supported. Coincides with
    :func:`dtw_dependent` for univariate series.
    """
    _check_compatible(p, q)
    total = 0.0
    for dp, dq in zip(p.dimensions, q.dimensions):
        remaining = threshold - total
        if remaining < 0.0:
            return math.inf
        band = window.resolved_width(dp.size)
        acc = _dtw_banded_sq(
            dp.reshape(1, -1), dq.reshape(1, -1), band, remaining * remaining
        )
        if not math.isfinite(acc):
            return math.inf
        total += math.sqrt(acc)
    return total
