"""Ridge regression solved in closed form, with leave-one-out selection.

The solver centers the columns of X and the targets (the intercept is never
penalized), takes one thin SVD and reuses it for every candidate
regularizer, scoring each by the exact leave-one-out squared error computed
from the hat-matrix diagonal. A thin SVD of an n x p matrix costs
O(min(n, p)^2 max(n, p)), so the wide case (features >> rows, the usual
situation after a convolutional transform) is effectively solved in the
dual n x n space. ``lambda = 0`` falls back to the pseudo-inverse solution.

The module also provides the flattened-series ridge baseline: a regressor
that treats the concatenated series values as tabular features.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import (
    TimeSeriesDataset,
    flatten_instance,
    interpolate_dataset,
    require_valid,
)
from .errors import (
    DegenerateSystemError,
    NonFiniteError,
    ShapeMismatchError,
)

__all__ = [
    "RidgeModel",
    "DEFAULT_LAMBDA_GRID",
    "ridge_fit",
    "ridge_predict",
    "FlattenedRidgeRegressor",
]

DEFAULT_LAMBDA_GRID = tuple(np.logspace(-3, 3, 10))


@dataclass(frozen=True)
class RidgeModel:
    """Fitted ridge coefficients plus selection diagnostics.

    ``gcv_scores[i]`` is the mean squared leave-one-out residual obtained
    with ``lambdas[i]``; the selected ``lam`` is the grid member with the
    smallest score (earliest wins ties).
    """

    coefficients: np.ndarray
    intercept: float
    lam: float
    lambdas: np.ndarray
    gcv_scores: np.ndarray

    @property
    def n_features(self) -> int:
        return self.coefficients.size


def _loo_scores(u, s, uty, y_centered, lambdas, leverage_offset, shape):
    """Exact LOO mean squared error per lambda from a thin SVD."""
    tol = s[0] * max(shape) * np.finfo(np.float64).eps if s.size else 0.0
    live = s > tol
    scores = np.empty(len(lambdas))
    for idx, lam in enumerate(lambdas):
        if lam == 0.0:
            shrink = np.where(live, 1.0, 0.0)
        else:
            shrink = np.where(live, s * s / (s * s + lam), 0.0)
        fitted = u @ (shrink * uty)
        leverage = leverage_offset + (u * u) @ shrink
        residual = y_centered - fitted
        denom = 1.0 - leverage
        if lam == 0.0 and (denom < 1e-8).any():
            # an interpolating unpenalized fit (leverage 1) has no defined
            # leave-one-out error; such a lambda is never selected
            scores[idx] = np.inf
            continue
        denom = np.where(denom < 1e-12, 1e-12, denom)
        scores[idx] = float(np.mean((residual / denom) ** 2))
    return scores, live


def ridge_fit(
    X: np.ndarray,
    y: np.ndarray,
    lambdas=DEFAULT_LAMBDA_GRID,
    fit_intercept: bool = True,
) -> RidgeModel:
    """Fit ridge regression, selecting the regularizer by leave-one-out error.

    Parameters
    ----------
    X : (n, p) array
        Feature matrix, n >= 2, all finite.
    y : (n,) array
        Targets, all finite.
    lambdas : sequence of non-negative floats
        Candidate regularizers; the default is 10 log-spaced values over
        [1e-3, 1e3]. A single-element grid skips selection.
    fit_intercept : bool
        When True (default) columns and targets are centered and the
        intercept absorbs the means; the penalty never touches it.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2:
        raise ValueError(f"X must be 2-d, got ndim={X.ndim}")
    if X.shape[1] == 0:
        raise DegenerateSystemError("X has no columns")
    if X.shape[0] != y.size:
        raise ShapeMismatchError(f"X has {X.shape[0]} rows but y has {y.size} entries")
    if X.shape[0] < 2:
        raise ValueError("need at least 2 rows")
    if not np.isfinite(X).all() or not np.isfinite(y).all():
        raise NonFiniteError("X and y must be finite")
    lambdas = np.asarray(lambdas, dtype=np.float64)
    if lambdas.size == 0 or (lambdas < 0).any():
        raise ValueError("lambdas must be a non-empty grid of non-negative values")

    if fit_intercept:
        x_mean = X.mean(axis=0)
        y_mean = float(y.mean())
        xc = X - x_mean
        yc = y - y_mean
        leverage_offset = 1.0 / X.shape[0]
    else:
        x_mean = np.zeros(X.shape[1])
        y_mean = 0.0
        xc = X
        yc = y
        leverage_offset = 0.0

    u, s, vt = np.linalg.svd(xc, full_matrices=False)
    uty = u.T @ yc
    scores, live = _loo_scores(u, s, uty, yc, lambdas, leverage_offset, xc.shape)
    best = int(np.argmin(scores))
    lam = float(lambdas[best])

    if lam == 0.0:
        d = np.where(live, 1.0 / np.where(live, s, 1.0), 0.0)
    else:
        d = np.where(live, s / (s * s + lam), 0.0)
    beta = vt.T @ (d * uty)
    intercept = y_mean - float(x_mean @ beta)
    return RidgeModel(
        coefficients=beta,
        intercept=intercept,
        lam=lam,
        lambdas=lambdas,
        gcv_scores=scores,
    )


def ridge_predict(model: RidgeModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ShapeMismatchError(
            f"expected {model.n_features} feature columns, got shape {X.shape}"
        )
    return X @ model.coefficients + model.intercept


class FlattenedRidgeRegressor:
    """Ridge on the flattened series: the series-agnostic tabular baseline.

    Each instance's dimensions are concatenated into one long feature
    vector (length D * L for equal-length data), discarding temporal
    structure entirely.
    """

    def __init__(self, lambdas=DEFAULT_LAMBDA_GRID):
        self.lambdas = lambdas
        self.model_: RidgeModel | None = None
        self._train_lengths: tuple[int, ...] | None = None

    def _design(self, ds: TimeSeriesDataset) -> np.ndarray:
        return np.vstack([flatten_instance(inst) for inst in ds.instances])

    def fit(self, train: TimeSeriesDataset) -> "FlattenedRidgeRegressor":
        train = interpolate_dataset(require_valid(train))
        self._train_lengths = train.dimension_lengths
        self.model_ = ridge_fit(self._design(train), train.targets, self.lambdas)
        return self

    def predict(self, ds: TimeSeriesDataset) -> np.ndarray:
        if self.model_ is None:
            raise RuntimeError("fit before predict")
        ds = interpolate_dataset(require_valid(ds))
        if ds.dimension_lengths != self._train_lengths:
            raise ShapeMismatchError(
                f"expected lengths {self._train_lengths}, got {ds.dimension_lengths}"
            )
        return ridge_predict(self.model_, self._design(ds))
