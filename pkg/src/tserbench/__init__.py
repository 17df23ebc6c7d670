"""Time series extrinsic regression: algorithms, archive I/O and benchmarking.

The package covers the full path from the archive's ``.ts`` files to a
statistical comparison of regressors: a dataset model with missing-value
interpolation, lock-step and elastic distances, nearest-neighbour and
random-kernel regressors, functional linear models, and the
rank/Friedman/Nemenyi evaluation pipeline with critical-difference
diagrams.
"""

from .data import (
    TimeSeriesDataset,
    TimeSeriesInstance,
    ValidationReport,
    flatten_instance,
    interpolate_dataset,
    interpolate_missing,
    unflatten,
    validate_dataset,
    znormalize_instance,
)
from .distances import WarpingWindow, dtw_dependent, dtw_independent, euclidean_distance
from .evaluation import (
    CdDiagram,
    FriedmanResult,
    RankTable,
    ResultsMatrix,
    fractional_ranks,
    friedman_test,
    nemenyi_cd,
    rank_table,
    render_cd_diagram,
    rmse,
    scaled_rmse,
)
from .experiment import (
    AlgorithmSpec,
    ExperimentConfig,
    ExperimentResult,
    aggregate_results,
    fetch_dataset,
    run_experiment,
)
from .knn import KnnRegressor
from .linear import FlattenedRidgeRegressor, RidgeModel, ridge_fit, ridge_predict
from .reference import ARCHIVE_DATASETS, REFERENCE_AVERAGE_RANKS, reference_results
from .rocket import RocketRegressor, apply_kernel, generate_kernels, rocket_transform
from .sofr import BsplineFlmRegressor, FpcrRegressor, bspline_basis, fpca_decompose
from .ts_io import load_ts_file, parse_ts, save_ts_file, serialize_ts

__version__ = "0.1.0"

__all__ = [
    "TimeSeriesInstance",
    "TimeSeriesDataset",
    "ValidationReport",
    "validate_dataset",
    "interpolate_missing",
    "interpolate_dataset",
    "flatten_instance",
    "unflatten",
    "znormalize_instance",
    "parse_ts",
    "serialize_ts",
    "load_ts_file",
    "save_ts_file",
    "WarpingWindow",
    "euclidean_distance",
    "dtw_dependent",
    "dtw_independent",
    "KnnRegressor",
    "RidgeModel",
    "ridge_fit",
    "ridge_predict",
    "FlattenedRidgeRegressor",
    "RocketRegressor",
    "generate_kernels",
    "apply_kernel",
    "rocket_transform",
    "FpcrRegressor",
    "BsplineFlmRegressor",
    "bspline_basis",
    "fpca_decompose",
    "rmse",
    "scaled_rmse",
    "fractional_ranks",
    "ResultsMatrix",
    "RankTable",
    "rank_table",
    "FriedmanResult",
    "friedman_test",
    "nemenyi_cd",
    "CdDiagram",
    "render_cd_diagram",
    "reference_results",
    "REFERENCE_AVERAGE_RANKS",
    "ARCHIVE_DATASETS",
    "AlgorithmSpec",
    "ExperimentConfig",
    "ExperimentResult",
    "run_experiment",
    "aggregate_results",
    "fetch_dataset",
]
