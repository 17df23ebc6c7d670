"""In-memory model for time series regression datasets.

An instance is a multivariate series (one value array per dimension, lengths
may differ between dimensions) paired with a continuous target. Timestamps
are implicit: values are taken to be uniformly sampled at indices
``0 .. L_j - 1``. Missing values are represented by NaN.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AllMissingDimensionError,
    InvalidDatasetError,
    MissingValuesError,
)

__all__ = [
    "TimeSeriesInstance",
    "TimeSeriesDataset",
    "ValidationCheck",
    "ValidationReport",
    "validate_dataset",
    "require_valid",
    "interpolate_missing",
    "interpolate_dataset",
    "flatten_instance",
    "unflatten",
    "znormalize_instance",
]


def _as_dimension(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"each dimension must be a 1-d sequence, got ndim={arr.ndim}")
    if arr.size < 1:
        raise ValueError("each dimension must contain at least one value")
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class TimeSeriesInstance:
    """One multivariate series plus its scalar target.

    Parameters
    ----------
    dimensions : sequence of 1-d float sequences
        Per-dimension value arrays; NaN marks a missing value. Lengths may
        differ between dimensions.
    target : float
        The continuous value to predict. Finiteness is enforced at dataset
        validation time, not construction time, so that invalid data can be
        represented and reported.
    """

    dimensions: tuple[np.ndarray, ...]
    target: float

    def __init__(self, dimensions: Iterable, target: float):
        dims = tuple(_as_dimension(d) for d in dimensions)
        if len(dims) < 1:
            raise ValueError("an instance needs at least one dimension")
        object.__setattr__(self, "dimensions", dims)
        object.__setattr__(self, "target", float(target))

    @property
    def n_dimensions(self) -> int:
        return len(self.dimensions)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(d.size for d in self.dimensions)

    @property
    def has_missing(self) -> bool:
        return any(bool(np.isnan(d).any()) for d in self.dimensions)

    def values_equal(self, other: "TimeSeriesInstance") -> bool:
        """Bitwise value equality, treating NaN as equal to NaN."""
        if self.n_dimensions != other.n_dimensions or self.lengths != other.lengths:
            return False
        if not (self.target == other.target or (np.isnan(self.target) and np.isnan(other.target))):
            return False
        return all(
            np.array_equal(a, b, equal_nan=True)
            for a, b in zip(self.dimensions, other.dimensions)
        )


@dataclass(frozen=True)
class TimeSeriesDataset:
    """A named collection of instances with a train/test role.

    Metadata (dimension count, per-dimension lengths, missing flag) is
    derived from the instances rather than stored, so it cannot drift.
    """

    name: str
    instances: tuple[TimeSeriesInstance, ...]
    split: str = "train"

    def __init__(self, name: str, instances: Iterable[TimeSeriesInstance], split: str = "train"):
        if split not in ("train", "test"):
            raise ValueError(f"split must be 'train' or 'test', got {split!r}")
        object.__setattr__(self, "name", str(name))
        object.__setattr__(self, "instances", tuple(instances))
        object.__setattr__(self, "split", split)

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    @property
    def n_instances(self) -> int:
        return len(self.instances)

    @property
    def n_dimensions(self) -> int:
        return self.instances[0].n_dimensions if self.instances else 0

    @property
    def dimension_lengths(self) -> tuple[int, ...]:
        """Per-dimension series lengths, taken from the first instance."""
        return self.instances[0].lengths if self.instances else ()

    @property
    def equal_length(self) -> bool:
        lengths = self.dimension_lengths
        return len(set(lengths)) == 1 if lengths else False

    @property
    def series_length(self) -> int | None:
        return self.dimension_lengths[0] if self.equal_length else None

    @property
    def targets(self) -> np.ndarray:
        return np.array([inst.target for inst in self.instances], dtype=np.float64)

    @property
    def has_missing(self) -> bool:
        return any(inst.has_missing for inst in self.instances)

    def with_instances(self, instances: Iterable[TimeSeriesInstance]) -> "TimeSeriesDataset":
        return TimeSeriesDataset(self.name, instances, self.split)


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[ValidationCheck, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> tuple[ValidationCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def summary(self) -> str:
        if self.ok:
            return "valid"
        return "; ".join(f"{c.name}: {c.detail}" for c in self.failures)


def validate_dataset(ds: TimeSeriesDataset) -> ValidationReport:
    """Check every dataset invariant and report per-check pass/fail.

    Checks: non-empty instance list, a shared dimension count, a shared
    per-dimension length across instances, and finite targets. A dataset
    failing any check is rejected by fit/predict entry points via
    :func:`require_valid`.
    """
    checks: list[ValidationCheck] = []

    if not ds.instances:
        checks.append(ValidationCheck("has instances", False, "no instances"))
        return ValidationReport(tuple(checks))
    checks.append(ValidationCheck("has instances", True))

    d0 = ds.instances[0].n_dimensions
    bad_dim = [i for i, inst in enumerate(ds.instances) if inst.n_dimensions != d0]
    if bad_dim:
        checks.append(
            ValidationCheck(
                "dimension count",
                False,
                f"dimension count mismatch: instance {bad_dim[0]} has "
                f"{ds.instances[bad_dim[0]].n_dimensions} dimensions, expected {d0}",
            )
        )
    else:
        checks.append(ValidationCheck("dimension count", True))

    if not bad_dim:
        lengths0 = ds.instances[0].lengths
        bad_len = [i for i, inst in enumerate(ds.instances) if inst.lengths != lengths0]
        if bad_len:
            checks.append(
                ValidationCheck(
                    "per-dimension lengths",
                    False,
                    f"length mismatch: instance {bad_len[0]} has lengths "
                    f"{ds.instances[bad_len[0]].lengths}, expected {lengths0}",
                )
            )
        else:
            checks.append(ValidationCheck("per-dimension lengths", True))

    bad_target = [i for i, inst in enumerate(ds.instances) if not np.isfinite(inst.target)]
    if bad_target:
        checks.append(
            ValidationCheck(
                "finite targets", False, f"instance {bad_target[0]} has a non-finite target"
            )
        )
    else:
        checks.append(ValidationCheck("finite targets", True))

    return ValidationReport(tuple(checks))


def require_valid(ds: TimeSeriesDataset) -> TimeSeriesDataset:
    """Raise :class:`InvalidDatasetError` unless the dataset validates."""
    report = validate_dataset(ds)
    if not report.ok:
        raise InvalidDatasetError(f"dataset {ds.name!r} is invalid: {report.summary()}")
    return ds


def interpolate_missing(inst: TimeSeriesInstance) -> TimeSeriesInstance:
    """Fill missing values by linear interpolation.

    Interior gaps are interpolated linearly between the nearest non-missing
    neighbours. Leading and trailing gaps hold the nearest valid value
    (a line needs two anchors; holding is the least-assumptive completion).
    Non-missing entries are preserved bit for bit and the operation is
    idempotent.

    Raises
    ------
    AllMissingDimensionError
        If some dimension contains no valid value at all.
    """
    if not inst.has_missing:
        return inst
    filled = []
    for j, dim in enumerate(inst.dimensions):
        valid = np.isfinite(dim)
        if valid.all():
            filled.append(dim)
            continue
        if not valid.any():
            raise AllMissingDimensionError(f"dimension {j} is entirely missing")
        idx = np.arange(dim.size, dtype=np.float64)
        out = np.interp(idx, idx[valid], dim[valid])
        out[valid] = dim[valid]  # keep original values exactly
        filled.append(out)
    return TimeSeriesInstance(filled, inst.target)


def interpolate_dataset(ds: TimeSeriesDataset) -> TimeSeriesDataset:
    """Apply :func:`interpolate_missing` to every instance."""
    if not ds.has_missing:
        return ds
    return ds.with_instances(interpolate_missing(inst) for inst in ds.instances)


def flatten_instance(inst: TimeSeriesInstance) -> np.ndarray:
    """Concatenate dimensions in order (dimension-major) into one vector.

    The result has length ``sum(L_j)`` (``D * L`` for equal lengths).

    Raises
    ------
    MissingValuesError
        If the instance still contains missing values.
    """
    if inst.has_missing:
        raise MissingValuesError("instance contains missing values; interpolate first")
    return np.concatenate(inst.dimensions)


def unflatten(vector: np.ndarray, lengths: Sequence[int]) -> list[np.ndarray]:
    """Split a flattened vector back into per-dimension arrays."""
    vector = np.asarray(vector, dtype=np.float64)
    if vector.size != sum(lengths):
        raise ValueError(f"vector of length {vector.size} does not match lengths {tuple(lengths)}")
    return [part for part in np.split(vector, np.cumsum(lengths)[:-1])]


def znormalize_instance(inst: TimeSeriesInstance) -> TimeSeriesInstance:
    """Per-dimension z-normalization: subtract the mean, divide by the std.

    Constant dimensions become all zeros. Off by default everywhere; the
    archive data is used unnormalised unless explicitly requested.
    """
    dims = []
    for dim in inst.dimensions:
        mean = float(np.nanmean(dim))
        std = float(np.nanstd(dim))
        dims.append((dim - mean) / std if std > 0 else np.zeros_like(dim))
    return TimeSeriesInstance(dims, inst.target)
