"""Reference results and metadata for the 19-dataset regression archive.

The archive's published benchmark reports the average RMSE of 13 algorithms
over 5 runs on each dataset, rounded to two decimals. That table is
embedded here as a fixture: it exercises the whole ranking and
statistical-comparison pipeline against known outputs, and the CLI can emit
it for offline experimentation. Also embedded is the archive's dataset
metadata (train/test sizes, series length, dimensions, missing flag) used
to sanity-check downloaded files.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evaluation import ResultsMatrix

__all__ = [
    "REFERENCE_ALGORITHMS",
    "REFERENCE_AVERAGE_RANKS",
    "ArchiveDatasetInfo",
    "ARCHIVE_DATASETS",
    "reference_results",
]

REFERENCE_ALGORITHMS = (
    "FPCR",
    "FPCR-Bspline",
    "SVR",
    "RandomForest",
    "XGBoost",
    "1NN-ED",
    "5NN-ED",
    "1NN-DTWD",
    "5NN-DTWD",
    "Rocket",
    "FCN",
    "ResNet",
    "Inception",
)

# published average ranks for the 13 algorithms, in the column order above
REFERENCE_AVERAGE_RANKS = (
    7.16, 7.21, 8.00, 5.79, 5.37, 10.95, 9.00, 10.11, 7.84, 3.74, 5.21, 5.47, 5.16,
)

_REFERENCE_RMSE = (
    ("AppliancesEnergy",
     (5.41, 5.41, 3.46, 3.46, 3.49, 5.23, 4.23, 6.04, 4.02, 2.30, 2.87, 3.07, 4.44)),
    ("HouseholdPowerConsumption1",
     (147.55, 147.55, 152.39, 248.86, 231.09, 473.93, 432.60, 427.04, 297.22, 132.80,
      162.24, 193.21, 153.72)),
    ("HouseholdPowerConsumption2",
     (46.93, 46.93, 55.98, 46.93, 44.37, 71.48, 64.27, 58.80, 51.50, 32.61, 46.83,
      39.08, 39.41)),
    ("BenzeneConcentration",
     (11.09, 11.10, 4.79, 0.86, 0.64, 6.54, 5.85, 4.98, 4.87, 3.36, 4.99, 4.06, 1.59)),
    ("BeijingPM10Quality",
     (99.73, 99.73, 110.57, 94.07, 93.14, 139.23, 115.67, 139.14, 115.50, 120.06,
      94.35, 95.49, 96.75)),
    ("BeijingPM25Quality",
     (69.38, 69.37, 75.73, 63.30, 59.50, 88.19, 74.16, 88.26, 72.72, 62.77, 59.73,
      64.46, 62.23)),
    ("LiveFuelMoistureContent",
     (37.68, 37.68, 39.73, 32.16, 32.44, 47.84, 38.54, 39.97, 35.19, 29.41, 33.26,
      30.35, 28.80)),
    ("FloodModeling1",
     (0.02, 0.02, 0.05, 0.02, 0.02, 0.02, 0.02, 0.01, 0.01, 0.00, 0.01, 0.01, 0.02)),
    ("FloodModeling2",
     (0.02, 0.02, 0.08, 0.01, 0.02, 0.02, 0.02, 0.02, 0.02, 0.01, 0.01, 0.01, 0.01)),
    ("FloodModeling3",
     (0.02, 0.02, 0.04, 0.02, 0.02, 0.02, 0.02, 0.01, 0.01, 0.00, 0.01, 0.02, 0.01)),
    ("AustraliaRainfall",
     (8.44, 8.44, 8.65, 8.39, 8.49, 30.25, 10.23, 12.00, 11.95, 8.12, 8.43, 8.18, 8.84)),
    ("PPGDalia",
     (20.67, 20.67, 19.01, 17.53, 16.58, 21.88, 18.28, 26.03, 20.77, 14.05, 13.04,
      11.38, 9.92)),
    ("IEEEPPG",
     (31.38, 31.38, 37.25, 32.11, 31.49, 33.21, 27.11, 37.14, 33.57, 36.52, 34.33,
      33.15, 23.90)),
    ("BIDMC32HR",
     (13.98, 13.98, 13.39, 15.02, 13.96, 14.84, 14.76, 15.29, 15.13, 13.94, 13.13,
      10.74, 9.43)),
    ("BIDMC32RR",
     (3.37, 3.37, 3.17, 4.35, 4.37, 4.39, 4.14, 3.53, 3.43, 4.09, 3.58, 3.92, 3.02)),
    ("BIDMC32SpO2",
     (4.95, 4.95, 4.80, 4.57, 4.45, 5.53, 5.41, 5.22, 5.12, 5.22, 5.97, 5.99, 5.58)),
    ("NewsHeadlineSentiment",
     (0.14, 0.14, 0.14, 0.15, 0.14, 0.20, 0.16, 0.20, 0.16, 0.14, 0.15, 0.15, 0.15)),
    ("NewsTitleSentiment",
     (0.14, 0.14, 0.14, 0.14, 0.14, 0.19, 0.15, 0.19, 0.15, 0.14, 0.14, 0.14, 0.16)),
    ("Covid3Month",
     (0.05, 0.05, 0.07, 0.04, 0.05, 0.05, 0.04, 0.05, 0.04, 0.04, 0.07, 0.10, 0.05)),
)


def reference_results() -> ResultsMatrix:
    """The published 19 x 13 RMSE matrix as a :class:`ResultsMatrix`."""
    names = tuple(name for name, _ in _REFERENCE_RMSE)
    values = np.array([row for _, row in _REFERENCE_RMSE], dtype=np.float64)
    return ResultsMatrix(names, REFERENCE_ALGORITHMS, values)


@dataclass(frozen=True)
class ArchiveDatasetInfo:
    """Shape metadata of one archive dataset."""

    name: str
    train_size: int
    test_size: int
    # per-dimension series lengths; most datasets share one length across
    # dimensions, PPGDalia does not
    lengths: tuple[int, ...]
    n_dimensions: int
    has_missing: bool


def _info(name, train, test, lengths, dims, missing):
    if isinstance(lengths, int):
        lengths = (lengths,) * dims
    return ArchiveDatasetInfo(name, train, test, tuple(lengths), dims, missing)


ARCHIVE_DATASETS = {
    info.name: info
    for info in (
        _info("AppliancesEnergy", 96, 42, 144, 24, False),
        _info("HouseholdPowerConsumption1", 746, 694, 1440, 5, True),
        _info("HouseholdPowerConsumption2", 746, 694, 1440, 5, True),
        _info("BenzeneConcentration", 3433, 5445, 240, 9, True),
        _info("BeijingPM25Quality", 12432, 5100, 24, 9, True),
        _info("BeijingPM10Quality", 12432, 5100, 24, 9, True),
        _info("LiveFuelMoistureContent", 3493, 1510, 365, 7, False),
        _info("FloodModeling1", 471, 202, 266, 1, False),
        _info("FloodModeling2", 389, 167, 266, 1, False),
        _info("FloodModeling3", 429, 184, 266, 1, False),
        _info("AustraliaRainfall", 112186, 48081, 24, 3, False),
        _info("PPGDalia", 43215, 21482, (256, 256, 256, 512), 4, False),
        _info("IEEEPPG", 1768, 1328, 1000, 5, False),
        _info("BIDMCRR", 5471, 2399, 4000, 2, False),
        _info("BIDMCHR", 5550, 2399, 4000, 2, False),
        _info("BIDMCSpO2", 5550, 2399, 4000, 2, False),
        _info("NewsHeadlineSentiment", 58213, 24951, 144, 3, False),
        _info("NewsTitleSentiment", 58213, 24951, 144, 3, False),
        _info("Covid3Month", 140, 61, 84, 1, False),
    )
}
