"""Seeded multi-run benchmark sweeps over datasets and algorithms.

A sweep evaluates every configured algorithm on every dataset over a number
of runs (the benchmark protocol averages 5), writing one JSON record per
(dataset, algorithm, run) to an append-only log as it goes. Completed runs
are skipped when the sweep is re-invoked, so an interrupted sweep resumes
where it stopped and a failed cell never disturbs finished ones.
Deterministic algorithms execute once and their value is replicated across
runs, which matches the averaging semantics at a fraction of the cost.

Per-run randomness is derived from ``base_seed + run_index``; streams for
different algorithms are decorrelated by spawning the seed sequence with
the CRC-32 of the algorithm name, so no two algorithms ever share a stream.
"""

from __future__ import annotations

import json
import os
import tempfile
import urllib.error
import urllib.request
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .data import (
    TimeSeriesDataset,
    interpolate_dataset,
    require_valid,
    znormalize_instance,
)
from .errors import (
    DatasetNotFoundError,
    InconsistentRecordsError,
    NetworkError,
    ParseFailureAfterDownloadError,
    TserBenchError,
)
from .evaluation import ResultsMatrix, rmse
from .knn import KnnRegressor
from .linear import FlattenedRidgeRegressor
from .rocket import RocketRegressor
from .sofr import BsplineFlmRegressor, FpcrRegressor
from .ts_io import load_ts_file

__all__ = [
    "DEFAULT_ARCHIVE_URL",
    "default_data_dir",
    "AlgorithmSpec",
    "parse_algorithm",
    "build_estimator",
    "ExperimentConfig",
    "cell_seed",
    "fetch_dataset",
    "resolve_dataset",
    "run_experiment",
    "aggregate_results",
    "ExperimentResult",
]

DEFAULT_ARCHIVE_URL = "http://tseregression.org"

_SHORTHAND = {
    "1nn-ed": ("knn", {"k": 1, "metric": "ed"}),
    "5nn-ed": ("knn", {"k": 5, "metric": "ed"}),
    "1nn-dtwd": ("knn", {"k": 1, "metric": "dtwd"}),
    "5nn-dtwd": ("knn", {"k": 5, "metric": "dtwd"}),
    "1nn-dtwi": ("knn", {"k": 1, "metric": "dtwi"}),
    "5nn-dtwi": ("knn", {"k": 5, "metric": "dtwi"}),
    "rocket": ("rocket", {}),
    "fpcr": ("fpcr", {}),
    "fpcr-bspline": ("fpcr-bspline", {}),
    "ridge-flat": ("ridge-flat", {}),
}

_DETERMINISTIC_KINDS = {"knn", "fpcr", "fpcr-bspline", "ridge-flat"}
_KNOWN_KINDS = _DETERMINISTIC_KINDS | {"rocket"}


def default_data_dir() -> Path:
    """Dataset cache directory: ``$TSERBENCH_DATA_DIR`` or the user data dir."""
    env = os.environ.get("TSERBENCH_DATA_DIR")
    if env:
        return Path(env)
    return Path.home() / ".local" / "share" / "tserbench"


@dataclass(frozen=True)
class AlgorithmSpec:
    """One algorithm entry of a sweep: a registry kind plus hyperparameters."""

    name: str
    kind: str
    params: dict = field(default_factory=dict)

    @property
    def deterministic(self) -> bool:
        return self.kind in _DETERMINISTIC_KINDS


def parse_algorithm(entry) -> AlgorithmSpec:
    """Accept a shorthand string ("5nn-dtwd", "rocket") or a mapping.

    Mappings carry ``kind`` (or a shorthand ``name``) plus hyperparameters,
    e.g. ``{"name": "rocket-1k", "kind": "rocket", "num_kernels": 1000}``.
    """
    if isinstance(entry, str):
        if entry not in _SHORTHAND:
            raise ValueError(
                f"unknown algorithm {entry!r}; known: {sorted(_SHORTHAND)}"
            )
        kind, params = _SHORTHAND[entry]
        return AlgorithmSpec(entry, kind, dict(params))
    entry = dict(entry)
    name = entry.pop("name", None)
    kind = entry.pop("kind", None)
    if kind is None and name in _SHORTHAND:
        kind, params = _SHORTHAND[name]
        params = {**params, **entry}
        return AlgorithmSpec(name, kind, params)
    if kind is None or kind not in _KNOWN_KINDS:
        raise ValueError(f"unknown algorithm kind {kind!r}; known: {sorted(_KNOWN_KINDS)}")
    return AlgorithmSpec(name or kind, kind, entry)


def build_estimator(spec: AlgorithmSpec, seed: int):
    """Instantiate the estimator behind a spec; ``seed`` feeds stochastic ones."""
    params = dict(spec.params)
    if spec.kind == "knn":
        return KnnRegressor(**params)
    if spec.kind == "fpcr":
        return FpcrRegressor(**params)
    if spec.kind == "fpcr-bspline":
        return BsplineFlmRegressor(**params)
    if spec.kind == "ridge-flat":
        return FlattenedRidgeRegressor(**params)
    if spec.kind == "rocket":
        params.setdefault("seed", seed)
        return RocketRegressor(**params)
    raise ValueError(f"unknown algorithm kind {spec.kind!r}")


@dataclass
class ExperimentConfig:
    """Everything a sweep needs; serializable to and from JSON."""

    datasets: tuple[str, ...]
    algorithms: tuple[AlgorithmSpec, ...]
    runs: int = 5
    base_seed: int = 0
    output_dir: str = "results"
    archive_url: str = DEFAULT_ARCHIVE_URL
    data_dir: str | None = None
    normalize: bool = False
    workers: int = 1

    def __post_init__(self):
        self.datasets = tuple(self.datasets)
        self.algorithms = tuple(
            a if isinstance(a, AlgorithmSpec) else parse_algorithm(a) for a in self.algorithms
        )
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        names = [a.name for a in self.algorithms]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate algorithm names in config: {names}")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        payload = json.loads(text)
        known = {
            "datasets", "algorithms", "runs", "base_seed", "output_dir",
            "archive_url", "data_dir", "normalize", "workers",
        }
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**payload)

    def to_json(self) -> str:
        payload = {
            "datasets": list(self.datasets),
            "algorithms": [
                {"name": a.name, "kind": a.kind, **a.params} for a in self.algorithms
            ],
            "runs": self.runs,
            "base_seed": self.base_seed,
            "output_dir": self.output_dir,
            "archive_url": self.archive_url,
            "data_dir": self.data_dir,
            "normalize": self.normalize,
            "workers": self.workers,
        }
        return json.dumps(payload, indent=2)


def cell_seed(base_seed: int, run_index: int, algorithm_name: str) -> int:
    """Derive the seed for one (algorithm, run) cell.

    Entropy is ``base_seed + run_index``; the spawn key carries the CRC-32
    of the algorithm name so different algorithms never share a stream.
    """
    sequence = np.random.SeedSequence(
        base_seed + run_index, spawn_key=(zlib.crc32(algorithm_name.encode("utf-8")),)
    )
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def fetch_dataset(
    name: str,
    data_dir: str | Path | None = None,
    base_url: str = DEFAULT_ARCHIVE_URL,
    timeout: float = 60.0,
) -> tuple[Path, Path]:
    """Download ``<base_url>/<name>_TRAIN.ts`` and ``_TEST.ts`` into the cache.

    A cache hit returns immediately without touching the network. Files are
    parse-verified before being moved into place, so a corrupted download
    never poisons the cache.
    """
    directory = Path(data_dir) if data_dir is not None else default_data_dir()
    dest = directory / name
    paths = (dest / f"{name}_TRAIN.ts", dest / f"{name}_TEST.ts")
    if all(p.exists() for p in paths):
        return paths
    dest.mkdir(parents=True, exist_ok=True)
    for split, path in zip(("TRAIN", "TEST"), paths):
        if path.exists():
            continue
        url = f"{base_url.rstrip('/')}/{name}_{split}.ts"
        try:
            with urllib.request.urlopen(url, timeout=timeout) as response:
                payload = response.read()
        except (urllib.error.URLError, OSError) as exc:
            raise NetworkError(f"failed to download {url}: {exc}") from exc
        fd, tmp_name = tempfile.mkstemp(dir=dest, suffix=".part")
        tmp = Path(tmp_name)
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(payload)
            try:
                load_ts_file(tmp, split=split.lower())
            except TserBenchError as exc:
                raise ParseFailureAfterDownloadError(
                    f"downloaded {url} but it does not parse: {exc}"
                ) from exc
            tmp.replace(path)
        finally:
            tmp.unlink(missing_ok=True)
    return paths


def resolve_dataset(
    entry: str,
    data_dir: str | Path | None = None,
    base_url: str = DEFAULT_ARCHIVE_URL,
    allow_fetch: bool = True,
) -> tuple[str, Path, Path]:
    """Resolve a config entry (directory path or archive name) to file paths."""
    as_path = Path(entry)
    if as_path.is_dir():
        name = as_path.name
        train = as_path / f"{name}_TRAIN.ts"
        test = as_path / f"{name}_TEST.ts"
        if train.exists() and test.exists():
            return name, train, test
        raise DatasetNotFoundError(
            f"directory {entry!r} lacks {train.name} / {test.name}"
        )
    directory = Path(data_dir) if data_dir is not None else default_data_dir()
    train = directory / entry / f"{entry}_TRAIN.ts"
    test = directory / entry / f"{entry}_TEST.ts"
    if train.exists() and test.exists():
        return entry, train, test
    if not allow_fetch:
        raise DatasetNotFoundError(f"dataset {entry!r} not found under {directory}")
    train, test = fetch_dataset(entry, directory, base_url)
    return entry, train, test


def _prepare(ds: TimeSeriesDataset, normalize: bool) -> TimeSeriesDataset:
    ds = interpolate_dataset(require_valid(ds))
    if normalize:
        ds = ds.with_instances(znormalize_instance(inst) for inst in ds.instances)
    return ds


@dataclass(frozen=True)
class ExperimentResult:
    matrix: ResultsMatrix
    failures: tuple[dict, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def _record_key(record: dict) -> tuple:
    return (record["dataset"], record["algorithm"], record["run"])


def _load_records(path: Path) -> dict[tuple, dict]:
    records: dict[tuple, dict] = {}
    if not path.exists():
        return records
    with path.open("r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            records[_record_key(record)] = record  # later lines win
    return records


def _run_cell(spec: AlgorithmSpec, cfg: ExperimentConfig, dataset_name, train, test):
    """All records for one (dataset, algorithm) cell."""
    records = []
    if spec.deterministic:
        seed = cell_seed(cfg.base_seed, 0, spec.name)
        estimator = build_estimator(spec, seed)
        estimator.fit(train)
        value = rmse(estimator.predict(test), test.targets)
        for run in range(cfg.runs):
            records.append(
                {
                    "dataset": dataset_name,
                    "algorithm": spec.name,
                    "run": run,
                    "seed": seed,
                    "rmse": value,
                    "status": "ok",
                    "replicated": run > 0,
                }
            )
        return records
    for run in range(cfg.runs):
        seed = cell_seed(cfg.base_seed, run, spec.name)
        estimator = build_estimator(spec, seed)
        estimator.fit(train)
        value = rmse(estimator.predict(test), test.targets)
        records.append(
            {
                "dataset": dataset_name,
                "algorithm": spec.name,
                "run": run,
                "seed": seed,
                "rmse": value,
                "status": "ok",
                "replicated": False,
            }
        )
    return records


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Execute the sweep, append run records, and write the averaged matrix.

    Outputs under ``cfg.output_dir``: ``records.jsonl`` (append-only run
    log), ``results.csv`` and ``results.json`` (the averaged matrix). Cells
    that fail are recorded and reported but never abort the sweep; their
    matrix entries are NaN.
    """
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records_path = out_dir / "records.jsonl"
    done = {
        key: rec for key, rec in _load_records(records_path).items() if rec["status"] == "ok"
    }
    failures: list[dict] = []
    dataset_names: list[str] = []

    def record_failure(dataset_name: str, algorithm: str, cause: Exception | str):
        failure = {
            "dataset": dataset_name,
            "algorithm": algorithm,
            "run": 0,
            "seed": None,
            "rmse": None,
            "status": "failed",
            "error": str(cause),
        }
        failures.append(failure)
        return failure

    jobs = []  # (dataset_name, spec, train, test) for cells still to run
    fresh_records: list[dict] = []
    for entry in cfg.datasets:
        try:
            name, train_path, test_path = resolve_dataset(
                entry, cfg.data_dir, cfg.archive_url
            )
            train = _prepare(load_ts_file(train_path, split="train"), cfg.normalize)
            test = _prepare(load_ts_file(test_path, split="test"), cfg.normalize)
        except TserBenchError as exc:
            name = Path(entry).name
            dataset_names.append(name)
            for spec in cfg.algorithms:
                fresh_records.append(record_failure(name, spec.name, exc))
            continue
        dataset_names.append(name)
        for spec in cfg.algorithms:
            needed = [r for r in range(cfg.runs) if (name, spec.name, r) not in done]
            if not needed:
                continue
            jobs.append((name, spec, train, test))

    def execute(job):
        name, spec, train, test = job
        try:
            return job, _run_cell(spec, cfg, name, train, test), None
        except Exception as exc:  # recorded, never fatal to the sweep
            return job, None, exc

    if cfg.workers == 1:
        outcomes = map(execute, jobs)
    else:
        pool = ThreadPoolExecutor(max_workers=cfg.workers)
        outcomes = pool.map(execute, jobs)

    with records_path.open("a", encoding="utf-8") as log:
        for (name, spec, _, _), cell_records, error in outcomes:
            if error is not None:
                failure = record_failure(name, spec.name, error)
                log.write(json.dumps(failure) + "\n")
                continue
            for record in cell_records:
                log.write(json.dumps(record) + "\n")
                log.flush()
                done[_record_key(record)] = record
    if cfg.workers > 1:
        pool.shutdown()

    matrix = aggregate_results(
        done.values(),
        dataset_names=tuple(dataset_names),
        algorithm_names=tuple(spec.name for spec in cfg.algorithms),
        runs=cfg.runs,
        allow_missing=True,
    )
    (out_dir / "results.csv").write_text(matrix.to_csv(), encoding="utf-8")
    (out_dir / "results.json").write_text(matrix.to_json(), encoding="utf-8")
    return ExperimentResult(matrix, tuple(failures))


def aggregate_results(
    records: Iterable[dict],
    dataset_names: tuple[str, ...] | None = None,
    algorithm_names: tuple[str, ...] | None = None,
    runs: int | None = None,
    allow_missing: bool = False,
) -> ResultsMatrix:
    """Average per-run records into a matrix; keeps raw runs as metadata.

    Every (dataset, algorithm) cell must carry the full run set
    ``0 .. runs-1`` unless ``allow_missing`` is set, in which case
    incomplete cells become NaN.
    """
    ok_records = [r for r in records if r.get("status", "ok") == "ok"]
    by_cell: dict[tuple[str, str], dict[int, float]] = {}
    for record in ok_records:
        cell = by_cell.setdefault((record["dataset"], record["algorithm"]), {})
        cell[record["run"]] = float(record["rmse"])

    if dataset_names is None:
        seen = []
        for record in ok_records:
            if record["dataset"] not in seen:
                seen.append(record["dataset"])
        dataset_names = tuple(seen)
    if algorithm_names is None:
        seen = []
        for record in ok_records:
            if record["algorithm"] not in seen:
                seen.append(record["algorithm"])
        algorithm_names = tuple(seen)
    if runs is None:
        runs = 1 + max((max(c) for c in by_cell.values() if c), default=-1)
        if runs < 1:
            raise InconsistentRecordsError("no usable records to aggregate")

    values = np.full((len(dataset_names), len(algorithm_names)), np.nan)
    per_run = np.full((len(dataset_names), len(algorithm_names), runs), np.nan)
    for i, ds_name in enumerate(dataset_names):
        for j, alg_name in enumerate(algorithm_names):
            cell = by_cell.get((ds_name, alg_name), {})
            missing = [r for r in range(runs) if r not in cell]
            if missing:
                if not allow_missing:
                    raise InconsistentRecordsError(
                        f"cell ({ds_name}, {alg_name}) lacks runs {missing}"
                    )
                continue
            runs_sorted = [cell[r] for r in range(runs)]
            per_run[i, j, :] = runs_sorted
            values[i, j] = float(np.mean(runs_sorted))
    return ResultsMatrix(tuple(dataset_names), tuple(algorithm_names), values, per_run)
