"""k-nearest-neighbour regression over series distances.

Fitting just retains the training set (lazy learner). Prediction computes
the distance from the query to every training instance, picks the k
smallest with a deterministic tie-break (smaller training index wins), and
averages their targets, either uniformly or weighted by inverse distance
with an exact-match short-circuit.
"""

from __future__ import annotations

import math

import numpy as np

from .data import TimeSeriesDataset, TimeSeriesInstance, interpolate_dataset, require_valid
from .distances import WarpingWindow, dtw_dependent, dtw_independent, euclidean_distance
from .errors import KTooLargeError, ShapeMismatchError

__all__ = ["KnnRegressor", "METRICS"]

METRICS = ("ed", "dtwd", "dtwi")


class KnnRegressor:
    """Nearest-neighbour regressor with ED or constrained DTW distances.

    Parameters
    ----------
    k : int
        Number of neighbours to average (the benchmark uses 1 and 5).
    metric : {"ed", "dtwd", "dtwi"}
        Euclidean, dependent DTW or independent DTW.
    window_fraction : float
        Sakoe-Chiba band fraction for the DTW metrics (default 0.1).
    weighting : {"uniform", "inverse"}
        Plain mean (default) or inverse-distance weighted mean. A query at
        distance zero short-circuits to that training target.
    early_abandon : bool
        Prune DTW computations that cannot enter the current top k. Never
        changes the prediction; only skips provably useless work.
    """

    def __init__(
        self,
        k: int = 1,
        metric: str = "ed",
        window_fraction: float = 0.1,
        weighting: str = "uniform",
        early_abandon: bool = False,
    ):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
        if weighting not in ("uniform", "inverse"):
            raise ValueError(f"weighting must be 'uniform' or 'inverse', got {weighting!r}")
        self.k = k
        self.metric = metric
        self.window = WarpingWindow(window_fraction)
        self.weighting = weighting
        self.early_abandon = early_abandon
        self.train_: TimeSeriesDataset | None = None

    def fit(self, train: TimeSeriesDataset) -> "KnnRegressor":
        train = interpolate_dataset(require_valid(train))
        if self.k > train.n_instances:
            raise KTooLargeError(
                f"k={self.k} exceeds the {train.n_instances} training instances"
            )
        self.train_ = train
        return self

    def _distance(self, query: TimeSeriesInstance, ref: TimeSeriesInstance, threshold: float) -> float:
        if self.metric == "ed":
            return euclidean_distance(query, ref)
        if self.metric == "dtwd":
            return dtw_dependent(query, ref, self.window, threshold)
        return dtw_independent(query, ref, self.window, threshold)

    def _neighbours(self, query: TimeSeriesInstance) -> tuple[np.ndarray, np.ndarray]:
        """Indices and distances of the k nearest, ties broken by index."""
        train = self.train_
        if query.n_dimensions != train.n_dimensions or query.lengths != train.dimension_lengths:
            raise ShapeMismatchError(
                f"query shape {query.lengths} does not match training shape "
                f"{train.dimension_lengths}"
            )
        # top[] holds (distance, index) sorted ascending; kth entry supplies
        # the abandon threshold once full
        top: list[tuple[float, int]] = []
        for idx, ref in enumerate(train.instances):
            threshold = math.inf
            if self.early_abandon and len(top) == self.k:
                threshold = top[-1][0]
            d = self._distance(query, ref, threshold)
            entry = (d, idx)
            if len(top) < self.k:
                top.append(entry)
                top.sort()
            elif entry < top[-1]:
                top[-1] = entry
                top.sort()
        dists = np.array([d for d, _ in top])
        idxs = np.array([i for _, i in top])
        return idxs, dists

    def predict_one(self, query: TimeSeriesInstance) -> float:
        """Prediction for a single query series."""
        if self.train_ is None:
            raise RuntimeError("fit before predict")
        idxs, dists = self._neighbours(query)
        targets = np.array([self.train_.instances[i].target for i in idxs])
        if self.weighting == "uniform":
            return float(targets.mean())
        zero = dists == 0.0
        if zero.any():
            # exact match: its target, lowest index first
            return float(targets[int(np.argmax(zero))])
        weights = 1.0 / dists
        return float(np.dot(weights, targets) / weights.sum())

    def predict(self, ds: TimeSeriesDataset) -> np.ndarray:
        """Predictions for every instance, ordered by instance index."""
        ds = interpolate_dataset(ds)
        return np.array([self.predict_one(inst) for inst in ds.instances])
