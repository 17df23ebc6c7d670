"""Random convolutional kernel transform with a ridge read-out.

A bank of random dilated convolution kernels is drawn once from a seeded
generator; each kernel reads a single input dimension and contributes two
features per series: the maximum of its feature map and the proportion of
positive values (PPV), so ``count`` kernels produce ``2 * count`` features
(20,000 for the default 10,000 kernels). Features are standardized on the
training set and fed to ridge regression with leave-one-out selection of
the regularizer.

Kernel hyperparameter distributions follow the established convention for
this transform: lengths drawn from {7, 9, 11}, standard-normal weights
mean-centered per kernel, bias uniform on (-1, 1), dilation 2**x with x
uniform on [0, log2((L-1)/(length-1))], and padding that either centers the
kernel span or is absent, with equal probability. For multivariate input
each kernel is assigned one dimension, round-robin then shuffled, keeping
the total kernel count fixed.

Randomness comes from numpy's PCG64 generator. Draws are sequential and
documented: first the dimension assignment is shuffled, then per kernel in
order: length, weights, bias, dilation exponent, padding coin. The same
seed therefore reproduces the bank bit for bit on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit, prange

from .data import TimeSeriesDataset, interpolate_dataset, require_valid
from .errors import MissingValuesError, SeriesTooShortError, ShapeMismatchError
from .linear import DEFAULT_LAMBDA_GRID, RidgeModel, ridge_fit, ridge_predict

__all__ = [
    "KERNEL_LENGTHS",
    "RocketKernel",
    "generate_kernels",
    "apply_kernel",
    "rocket_transform",
    "RocketRegressor",
]

KERNEL_LENGTHS = (7, 9, 11)

_FORMAT_VERSION = 1


@dataclass(frozen=True)
class RocketKernel:
    """One random convolution kernel bound to an input dimension."""

    length: int
    weights: np.ndarray  # mean-centered, shape (length,)
    bias: float
    dilation: int
    padding: int
    dimension_index: int

    @property
    def span(self) -> int:
        return (self.length - 1) * self.dilation + 1


def generate_kernels(
    count: int, dim_lengths: Sequence[int], seed: int | np.random.Generator = 0
) -> list[RocketKernel]:
    """Draw a kernel bank for series with the given per-dimension lengths."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    dim_lengths = tuple(int(length) for length in dim_lengths)
    if not dim_lengths:
        raise ValueError("dim_lengths must be non-empty")
    if min(dim_lengths) < min(KERNEL_LENGTHS):
        raise SeriesTooShortError(
            f"series length {min(dim_lengths)} is below the smallest kernel "
            f"length {min(KERNEL_LENGTHS)}"
        )
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    assignment = np.arange(count, dtype=np.int64) % len(dim_lengths)
    rng.shuffle(assignment)

    kernels = []
    for dim_index in assignment:
        series_length = dim_lengths[dim_index]
        candidates = [l for l in KERNEL_LENGTHS if l <= series_length]
        length = int(candidates[rng.integers(len(candidates))])
        weights = rng.normal(0.0, 1.0, length)
        weights = weights - weights.mean()
        weights.flags.writeable = False
        bias = float(rng.uniform(-1.0, 1.0))
        max_exponent = math.log2((series_length - 1) / (length - 1))
        dilation = int(2 ** rng.uniform(0.0, max_exponent))
        padding = ((length - 1) * dilation) // 2 if rng.integers(2) == 1 else 0
        kernels.append(
            RocketKernel(
                length=length,
                weights=weights,
                bias=bias,
                dilation=dilation,
                padding=int(padding),
                dimension_index=int(dim_index),
            )
        )
    return kernels


@njit(cache=True)
def _apply_kernel_1d(x, weights, bias, dilation, padding):
    length = x.size
    wlen = weights.size
    out_len = length + 2 * padding - (wlen - 1) * dilation
    highest = -np.inf
    positive = 0
    end = length + padding - (wlen - 1) * dilation
    for start in range(-padding, end):
        total = bias
        index = start
        for j in range(wlen):
            if 0 <= index < length:
                total += weights[j] * x[index]
            index += dilation
        if total > highest:
            highest = total
        if total > 0.0:
            positive += 1
    return highest, positive / out_len


def apply_kernel(series: np.ndarray, kernel: RocketKernel) -> tuple[float, float]:
    """Convolve one series with one kernel; returns (max, ppv).

    The feature map is ``f_t = bias + sum_m w_m * x[t + m*dilation - padding]``
    with out-of-range reads contributing zero.
    """
    x = np.ascontiguousarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("series must be 1-d")
    out_len = x.size + 2 * kernel.padding - (kernel.length - 1) * kernel.dilation
    if out_len < 1:
        raise SeriesTooShortError(
            f"series of length {x.size} (+{2 * kernel.padding} padding) is shorter "
            f"than the kernel span {kernel.span}"
        )
    mx, ppv = _apply_kernel_1d(x, kernel.weights, kernel.bias, kernel.dilation, kernel.padding)
    return float(mx), float(ppv)


@njit(parallel=True, cache=True)
def _transform_packed(
    data_flat,
    dim_offsets,
    dim_lengths,
    n_instances,
    k_dim,
    k_bias,
    k_dilation,
    k_padding,
    w_flat,
    w_offsets,
    w_lengths,
    out,
):
    n_kernels = k_dim.size
    for i in prange(n_instances):
        for q in range(n_kernels):
            d = k_dim[q]
            length = dim_lengths[d]
            base = dim_offsets[d] + i * length
            wlen = w_lengths[q]
            woff = w_offsets[q]
            dilation = k_dilation[q]
            padding = k_padding[q]
            out_len = length + 2 * padding - (wlen - 1) * dilation
            highest = -np.inf
            positive = 0
            end = length + padding - (wlen - 1) * dilation
            for start in range(-padding, end):
                total = k_bias[q]
                index = start
                for j in range(wlen):
                    if 0 <= index < length:
                        total += w_flat[woff + j] * data_flat[base + index]
                    index += dilation
                if total > highest:
                    highest = total
                if total > 0.0:
                    positive += 1
            out[i, 2 * q] = highest
            out[i, 2 * q + 1] = positive / out_len


def _pack_dataset(ds: TimeSeriesDataset) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Concatenate per-dimension matrices into one flat float64 buffer."""
    lengths = np.array(ds.dimension_lengths, dtype=np.int64)
    chunks = []
    offsets = np.zeros(lengths.size, dtype=np.int64)
    position = 0
    for j, length in enumerate(lengths):
        offsets[j] = position
        block = np.ascontiguousarray(
            np.vstack([inst.dimensions[j] for inst in ds.instances])
        ).ravel()
        chunks.append(block)
        position += block.size
    return np.concatenate(chunks), offsets, lengths


def _pack_kernels(kernels: Sequence[RocketKernel]):
    k_dim = np.array([k.dimension_index for k in kernels], dtype=np.int64)
    k_bias = np.array([k.bias for k in kernels], dtype=np.float64)
    k_dilation = np.array([k.dilation for k in kernels], dtype=np.int64)
    k_padding = np.array([k.padding for k in kernels], dtype=np.int64)
    w_lengths = np.array([k.length for k in kernels], dtype=np.int64)
    w_offsets = np.concatenate(([0], np.cumsum(w_lengths)[:-1])).astype(np.int64)
    w_flat = np.concatenate([k.weights for k in kernels]).astype(np.float64)
    return k_dim, k_bias, k_dilation, k_padding, w_flat, w_offsets, w_lengths


def rocket_transform(ds: TimeSeriesDataset, kernels: Sequence[RocketKernel]) -> np.ndarray:
    """Feature matrix with one row per instance and [max, ppv] per kernel."""
    if ds.has_missing:
        raise MissingValuesError("dataset contains missing values; interpolate first")
    n_dims = ds.n_dimensions
    for k in kernels:
        if not 0 <= k.dimension_index < n_dims:
            raise ShapeMismatchError(
                f"kernel reads dimension {k.dimension_index} but data has {n_dims}"
            )
    data_flat, dim_offsets, dim_lengths = _pack_dataset(ds)
    packed = _pack_kernels(kernels)
    out = np.empty((ds.n_instances, 2 * len(kernels)), dtype=np.float64)
    _transform_packed(data_flat, dim_offsets, dim_lengths, ds.n_instances, *packed, out)
    return out


class RocketRegressor:
    """The random-kernel transform with a ridge regression read-out."""

    def __init__(self, num_kernels: int = 10_000, seed: int = 0, lambdas=DEFAULT_LAMBDA_GRID):
        self.num_kernels = num_kernels
        self.seed = seed
        self.lambdas = lambdas
        self.kernels_: list[RocketKernel] | None = None
        self.ridge_: RidgeModel | None = None
        self.feature_means_: np.ndarray | None = None
        self.feature_stds_: np.ndarray | None = None
        self._train_lengths: tuple[int, ...] | None = None

    def _standardize(self, features: np.ndarray) -> np.ndarray:
        live = self.feature_stds_ > 0
        out = np.zeros_like(features)
        out[:, live] = (features[:, live] - self.feature_means_[live]) / self.feature_stds_[live]
        return out

    def fit(self, train: TimeSeriesDataset) -> "RocketRegressor":
        train = interpolate_dataset(require_valid(train))
        self._train_lengths = train.dimension_lengths
        self.kernels_ = generate_kernels(self.num_kernels, self._train_lengths, self.seed)
        features = rocket_transform(train, self.kernels_)
        self.feature_means_ = features.mean(axis=0)
        self.feature_stds_ = features.std(axis=0)
        self.ridge_ = ridge_fit(self._standardize(features), train.targets, self.lambdas)
        return self

    def predict(self, ds: TimeSeriesDataset) -> np.ndarray:
        if self.ridge_ is None:
            raise RuntimeError("fit before predict")
        ds = interpolate_dataset(ds)
        if ds.dimension_lengths != self._train_lengths:
            raise ShapeMismatchError(
                f"expected lengths {self._train_lengths}, got {ds.dimension_lengths}"
            )
        return ridge_predict(self.ridge_, self._standardize(rocket_transform(ds, self.kernels_)))

    def save(self, path: str | Path) -> None:
        """Dump kernels, scaler statistics and ridge coefficients to ``.npz``."""
        if self.ridge_ is None:
            raise RuntimeError("fit before save")
        k_dim, k_bias, k_dilation, k_padding, w_flat, w_offsets, w_lengths = _pack_kernels(
            self.kernels_
        )
        np.savez(
            path,
            format_version=np.int64(_FORMAT_VERSION),
            num_kernels=np.int64(self.num_kernels),
            seed=np.int64(self.seed),
            train_lengths=np.array(self._train_lengths, dtype=np.int64),
            k_dim=k_dim,
            k_bias=k_bias,
            k_dilation=k_dilation,
            k_padding=k_padding,
            w_flat=w_flat,
            w_offsets=w_offsets,
            w_lengths=w_lengths,
            feature_means=self.feature_means_,
            feature_stds=self.feature_stds_,
            coefficients=self.ridge_.coefficients,
            intercept=np.float64(self.ridge_.intercept),
            lam=np.float64(self.ridge_.lam),
            lambdas=np.asarray(self.ridge_.lambdas, dtype=np.float64),
            gcv_scores=self.ridge_.gcv_scores,
        )

    @classmethod
    def load(cls, path: str | Path) -> "RocketRegressor":
        with np.load(path) as blob:
            version = int(blob["format_version"])
            if version != _FORMAT_VERSION:
                raise ValueError(f"unsupported model format version {version}")
            model = cls(num_kernels=int(blob["num_kernels"]), seed=int(blob["seed"]))
            model._train_lengths = tuple(int(v) for v in blob["train_lengths"])
            kernels = []
            for q in range(int(blob["num_kernels"])):
                offset = int(blob["w_offsets"][q])
                length = int(blob["w_lengths"][q])
                weights = blob["w_flat"][offset : offset + length].copy()
                weights.flags.writeable = False
                kernels.append(
                    RocketKernel(
                        length=length,
                        weights=weights,
                        bias=float(blob["k_bias"][q]),
                        dilation=int(blob["k_dilation"][q]),
                        padding=int(blob["k_padding"][q]),
                        dimension_index=int(blob["k_dim"][q]),
                    )
                )
            model.kernels_ = kernels
            model.feature_means_ = blob["feature_means"].copy()
            model.feature_stds_ = blob["feature_stds"].copy()
            model.ridge_ = RidgeModel(
                coefficients=blob["coefficients"].copy(),
                intercept=float(blob["intercept"]),
                lam=float(blob["lam"]),
                lambdas=blob["lambdas"].copy(),
                gcv_scores=blob["gcv_scores"].copy(),
            )
            model.lambdas = tuple(model.ridge_.lambdas)
        return model
