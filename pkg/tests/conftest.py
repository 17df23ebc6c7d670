"""Shared fixtures: synthetic datasets and archive-data discovery."""

import numpy as np
import pytest

from tserbench import TimeSeriesDataset, TimeSeriesInstance
from tserbench.errors import TserBenchError
from tserbench.experiment import resolve_dataset
from tserbench.ts_io import load_ts_file


def make_sine_dataset(
    n: int,
    length: int = 50,
    n_dims: int = 1,
    seed: int = 0,
    name: str = "sine",
    split: str = "train",
    noise: float = 0.05,
) -> TimeSeriesDataset:
    """Series are noisy sines; the target is the frequency."""
    rng = np.random.default_rng(seed)
    grid = np.linspace(0.0, 6.0, length)
    instances = []
    for _ in range(n):
        freq = rng.uniform(1.0, 3.0)
        dims = [
            np.sin(freq * grid + d) + noise * rng.normal(size=length)
            for d in range(n_dims)
        ]
        instances.append(TimeSeriesInstance(dims, freq))
    return TimeSeriesDataset(name, instances, split)


@pytest.fixture
def sine_train():
    return make_sine_dataset(30, seed=1, split="train")


@pytest.fixture
def sine_test():
    return make_sine_dataset(12, seed=2, split="test")


def load_archive_dataset(name: str):
    """Load a real archive dataset from the cache, fetching it if the
    network allows; otherwise skip the calling test."""
    try:
        _, train_path, test_path = resolve_dataset(name)
    except TserBenchError as exc:
        pytest.skip(f"archive dataset {name} unavailable (no cache, no network): {exc}")
    return load_ts_file(train_path, split="train"), load_ts_file(test_path, split="test")
