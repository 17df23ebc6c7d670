"""Scalar-on-function regression: functional linear models.

A series is treated as a function W(s) sampled on a uniform grid mapped to
[0, 1], and the target is modelled as

    Y = intercept + integral_0^1 W(s) beta(s) ds + noise,

with the integral approximated by the Riemann sum ``(1/M) sum_t W(t) B(t)``
over the M grid points. Two representations of the coefficient function
are provided:

* functional principal components: beta(s) lives in the span of the leading
  singular directions of the centered data matrix (principal component
  regression on the component scores);
* B-splines: beta(s) = sum_k b_k B_k(s) with an open-uniform cubic basis
  evaluated by the Cox-de Boor recursion.

Multivariate series are handled by concatenating dimensions before basis
expansion, the simplest faithful extension.
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
from .errors import InvalidBasisSizeError, KTooLargeError, ShapeMismatchError
from .linear import RidgeModel, ridge_fit, ridge_predict

__all__ = [
    "FpcaResult",
    "fpca_decompose",
    "bspline_basis",
    "FpcrRegressor",
    "BsplineFlmRegressor",
    "FLM_LAMBDA_GRID",
]

# light regularization only: enough to survive collinear bases, small enough
# to stay indistinguishable from least squares on well-posed problems
FLM_LAMBDA_GRID = tuple(np.logspace(-8, -2, 7))

DEFAULT_VARIANCE_TARGET = 0.95
MAX_AUTO_COMPONENTS = 10


def _design_matrix(ds: TimeSeriesDataset) -> np.ndarray:
    # ragged dimensions still concatenate to a fixed-width design because
    # each dimension's length is shared across instances
    return np.vstack([flatten_instance(inst) for inst in ds.instances])


@dataclass(frozen=True)
class FpcaResult:
    """Leading principal directions of a set of curves.

    ``loadings`` rows are orthonormal on the grid; ``scores`` are the
    centered curves projected onto them; ``explained_variance_ratio`` is
    non-increasing.
    """

    mean_curve: np.ndarray
    loadings: np.ndarray  # (K, M)
    scores: np.ndarray  # (N, K)
    explained_variance_ratio: np.ndarray  # (K,)


def fpca_decompose(train: TimeSeriesDataset, n_components: int) -> FpcaResult:
    """Top singular directions of the instance-by-grid matrix."""
    train = interpolate_dataset(require_valid(train))
    X = _design_matrix(train)
    n, m = X.shape
    if not 1 <= n_components <= min(n, m):
        raise KTooLargeError(
            f"n_components={n_components} not in [1, min(N={n}, M={m})]"
        )
    mean_curve = X.mean(axis=0)
    centered = X - mean_curve
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    loadings = vt[:n_components]
    scores = centered @ loadings.T
    power = singular**2
    # centering identical curves leaves ~eps-sized residue; below the noise
    # floor the data carries no variance at all
    floor = (np.finfo(np.float64).eps * max(n, m) * max(1.0, float(np.abs(X).max()))) ** 2
    total = power.sum()
    if total <= floor:
        ratios = np.zeros(n_components)
    else:
        ratios = power[:n_components] / total
    return FpcaResult(mean_curve, loadings, scores, ratios)


def _auto_components(train: TimeSeriesDataset) -> int:
    """Smallest count explaining 95% of variance, capped at 10."""
    X = _design_matrix(interpolate_dataset(train))
    cap = min(MAX_AUTO_COMPONENTS, min(X.shape))
    singular = np.linalg.svd(X - X.mean(axis=0), compute_uv=False)
    power = singular**2
    total = power.sum()
    if total <= 0:
        return 1
    cumulative = np.cumsum(power) / total
    enough = np.nonzero(cumulative >= DEFAULT_VARIANCE_TARGET)[0]
    k = int(enough[0]) + 1 if enough.size else cap
    return max(1, min(k, cap))


class FpcrRegressor:
    """Principal component regression on curve scores.

    Targets are regressed on the component scores by least squares with an
    intercept; the coefficient function is reconstructed as the same linear
    combination of the loading curves.
    """

    def __init__(self, n_components: int | None = None):
        self.n_components = n_components
        self.basis_kind = "fpc"
        self.fpca_: FpcaResult | None = None
        self.score_coef_: np.ndarray | None = None
        self.intercept_: float | None = None
        self.coefficient_function_: np.ndarray | None = None
        self.residuals_: np.ndarray | None = None
        self._grid_size: int | None = None

    def fit(self, train: TimeSeriesDataset) -> "FpcrRegressor":
        train = interpolate_dataset(require_valid(train))
        k = self.n_components if self.n_components is not None else _auto_components(train)
        self.fpca_ = fpca_decompose(train, k)
        self._grid_size = self.fpca_.mean_curve.size
        y = train.targets
        y_mean = float(y.mean())
        coef, *_ = np.linalg.lstsq(self.fpca_.scores, y - y_mean, rcond=None)
        self.score_coef_ = coef
        self.intercept_ = y_mean
        self.coefficient_function_ = self.fpca_.loadings.T @ coef
        self.residuals_ = y - (y_mean + self.fpca_.scores @ coef)
        return self

    def predict(self, ds: TimeSeriesDataset) -> np.ndarray:
        if self.fpca_ is None:
            raise RuntimeError("fit before predict")
        ds = interpolate_dataset(ds)
        X = _design_matrix(ds)
        if X.shape[1] != self._grid_size:
            raise ShapeMismatchError(
                f"expected flattened length {self._grid_size}, got {X.shape[1]}"
            )
        scores = (X - self.fpca_.mean_curve) @ self.fpca_.loadings.T
        return self.intercept_ + scores @ self.score_coef_


def _open_uniform_knots(n_basis: int, degree: int) -> np.ndarray:
    n_interior = n_basis - degree - 1
    interior = np.linspace(0.0, 1.0, n_interior + 2)[1:-1]
    return np.concatenate(
        (np.zeros(degree + 1), interior, np.ones(degree + 1))
    )


def bspline_basis(grid_size: int, n_basis: int, degree: int = 3) -> np.ndarray:
    """Cox-de Boor evaluation of an open-uniform basis on [0, 1].

    Returns a ``(grid_size, n_basis)`` matrix of basis values at the grid
    points ``t_j = j / (grid_size - 1)``. The basis is non-negative and
    partitions unity at every grid point; the right endpoint belongs to the
    last interval.
    """
    if degree < 0:
        raise InvalidBasisSizeError(f"degree must be >= 0, got {degree}")
    if n_basis < degree + 1:
        raise InvalidBasisSizeError(
            f"n_basis={n_basis} is too small for degree {degree} (need >= {degree + 1})"
        )
    if grid_size < 1:
        raise ValueError(f"grid_size must be >= 1, got {grid_size}")
    knots = _open_uniform_knots(n_basis, degree)
    t = np.linspace(0.0, 1.0, grid_size) if grid_size > 1 else np.zeros(1)

    # degree 0: indicator of [knot_i, knot_{i+1}), right-closed at 1.0
    n_intervals = knots.size - 1
    basis = np.zeros((t.size, n_intervals))
    for i in range(n_intervals):
        if knots[i + 1] > knots[i]:
            inside = (t >= knots[i]) & (t < knots[i + 1])
            if knots[i + 1] == knots[-1]:
                inside |= t == knots[-1]
            basis[inside, i] = 1.0

    for d in range(1, degree + 1):
        next_basis = np.zeros((t.size, n_intervals - d))
        for i in range(n_intervals - d):
            left_den = knots[i + d] - knots[i]
            right_den = knots[i + d + 1] - knots[i + 1]
            term = np.zeros(t.size)
            if left_den > 0:
                term += (t - knots[i]) / left_den * basis[:, i]
            if right_den > 0:
                term += (knots[i + d + 1] - t) / right_den * basis[:, i + 1]
            next_basis[:, i] = term
        basis = next_basis
    return basis


class BsplineFlmRegressor:
    """Functional linear model with a B-spline coefficient function.

    The design entry for instance i and basis k is the quadrature
    ``(1/M) sum_t W_i(t) B_k(t)``; lightly regularized least squares on
    that design yields the basis weights.
    """

    def __init__(self, n_basis: int = 7, degree: int = 3, lambdas=FLM_LAMBDA_GRID):
        self.n_basis = n_basis
        self.degree = degree
        self.lambdas = lambdas
        self.basis_kind = "bspline"
        self.basis_: np.ndarray | None = None
        self.knots_: np.ndarray | None = None
        self.ridge_: RidgeModel | None = None
        self.coefficient_function_: np.ndarray | None = None
        self.residuals_: np.ndarray | None = None
        self._grid_size: int | None = None

    @property
    def intercept_(self) -> float:
        return self.ridge_.intercept

    def _quadrature(self, X: np.ndarray) -> np.ndarray:
        return X @ self.basis_ / X.shape[1]

    def fit(self, train: TimeSeriesDataset) -> "BsplineFlmRegressor":
        train = interpolate_dataset(require_valid(train))
        X = _design_matrix(train)
        self._grid_size = X.shape[1]
        self.basis_ = bspline_basis(self._grid_size, self.n_basis, self.degree)
        self.knots_ = _open_uniform_knots(self.n_basis, self.degree)
        design = self._quadrature(X)
        self.ridge_ = ridge_fit(design, train.targets, self.lambdas)
        self.coefficient_function_ = self.basis_ @ self.ridge_.coefficients
        self.residuals_ = train.targets - ridge_predict(self.ridge_, design)
        return self

    def predict(self, ds: TimeSeriesDataset) -> np.ndarray:
        if self.ridge_ is None:
            raise RuntimeError("fit before predict")
        ds = interpolate_dataset(ds)
        X = _design_matrix(ds)
        if X.shape[1] != self._grid_size:
            raise ShapeMismatchError(
                f"expected flattened length {self._grid_size}, got {X.shape[1]}"
            )
        return ridge_predict(self.ridge_, self._quadrature(X))
