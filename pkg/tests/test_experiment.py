import functools
import http.server
import json
import threading

import numpy as np
import pytest

from tserbench import (
    ExperimentConfig,
    TimeSeriesDataset,
    TimeSeriesInstance,
    aggregate_results,
    fetch_dataset,
    run_experiment,
    save_ts_file,
)
from tserbench.errors import (
    DatasetNotFoundError,
    InconsistentRecordsError,
    NetworkError,
    ParseFailureAfterDownloadError,
)
from tserbench.experiment import (
    AlgorithmSpec,
    build_estimator,
    cell_seed,
    parse_algorithm,
    resolve_dataset,
)

from conftest import make_sine_dataset


def write_mini_archive(root, names=("SineA", "SineB"), n_train=14, n_test=6, length=24):
    """A tiny on-disk archive laid out like the real one."""
    for offset, name in enumerate(names):
        d = root / name
        d.mkdir(parents=True)
        train = make_sine_dataset(n_train, length=length, seed=100 + offset, name=name)
        test = make_sine_dataset(
            n_test, length=length, seed=200 + offset, name=name, split="test"
        )
        save_ts_file(train, d / f"{name}_TRAIN.ts")
        save_ts_file(test, d / f"{name}_TEST.ts")


def mini_config(tmp_path, **overrides):
    defaults = dict(
        datasets=("SineA", "SineB"),
        algorithms=(
            "1nn-ed",
            {"name": "rocket-tiny", "kind": "rocket", "num_kernels": 50},
        ),
        runs=3,
        base_seed=7,
        output_dir=str(tmp_path / "out"),
        data_dir=str(tmp_path / "archive"),
    )
    defaults.update(overrides)
    return ExperimentConfig(**defaults)


# ---------------------------------------------------------------- specs


def test_parse_algorithm_shorthands():
    spec = parse_algorithm("5nn-dtwd")
    assert spec.kind == "knn"
    assert spec.params == {"k": 5, "metric": "dtwd"}
    assert spec.deterministic
    assert not parse_algorithm("rocket").deterministic
    with pytest.raises(ValueError):
        parse_algorithm("13nn-super")


def test_parse_algorithm_mapping():
    spec = parse_algorithm({"name": "rocket-1k", "kind": "rocket", "num_kernels": 1000})
    assert spec.params == {"num_kernels": 1000}
    est = build_estimator(spec, seed=3)
    assert est.num_kernels == 1000 and est.seed == 3
    merged = parse_algorithm({"name": "1nn-dtwd", "window_fraction": 0.2})
    assert merged.params == {"k": 1, "metric": "dtwd", "window_fraction": 0.2}


def test_config_json_roundtrip(tmp_path):
    cfg = mini_config(tmp_path)
    back = ExperimentConfig.from_json(cfg.to_json())
    assert back.datasets == cfg.datasets
    assert back.algorithms == cfg.algorithms
    assert back.runs == cfg.runs
    with pytest.raises(ValueError):
        ExperimentConfig.from_json(json.dumps({"datasets": [], "algorithms": [], "bogus": 1}))


def test_cell_seed_is_stable_and_decorrelated():
    assert cell_seed(7, 0, "rocket") == cell_seed(7, 0, "rocket")
    assert cell_seed(7, 0, "rocket") != cell_seed(7, 1, "rocket")
    assert cell_seed(7, 0, "rocket") != cell_seed(7, 0, "fpcr")


# ---------------------------------------------------------------- aggregation


def record(dataset, algorithm, run, value):
    return {"dataset": dataset, "algorithm": algorithm, "run": run,
            "rmse": value, "status": "ok"}


def test_aggregate_mean_and_metadata():
    records = [record("d", "a", r, v) for r, v in enumerate([1.0, 2.0, 3.0, 4.0, 5.0])]
    matrix = aggregate_results(records)
    assert matrix.values[0, 0] == 3.0
    assert matrix.per_run[0, 0].tolist() == [1.0, 2.0, 3.0, 4.0, 5.0]
    constant = aggregate_results([record("d", "a", r, 2.5) for r in range(5)])
    assert constant.values[0, 0] == 2.5


def test_aggregate_missing_run_raises():
    records = [record("d", "a", 0, 1.0), record("d", "a", 2, 3.0)]
    with pytest.raises(InconsistentRecordsError):
        aggregate_results(records, runs=3)


# ---------------------------------------------------------------- sweeps


def test_run_experiment_end_to_end(tmp_path):
    write_mini_archive(tmp_path / "archive")
    cfg = mini_config(tmp_path)
    result = run_experiment(cfg)
    assert result.ok
    matrix = result.matrix
    assert matrix.dataset_names == ("SineA", "SineB")
    assert matrix.algorithm_names == ("1nn-ed", "rocket-tiny")
    assert np.isfinite(matrix.values).all()
    assert matrix.per_run.shape == (2, 2, 3)
    # deterministic algorithm: identical value replicated across runs
    assert len(set(matrix.per_run[0, 0].tolist())) == 1
    assert (tmp_path / "out" / "results.csv").exists()
    assert (tmp_path / "out" / "records.jsonl").exists()


def test_run_experiment_deterministic_and_resumable(tmp_path):
    write_mini_archive(tmp_path / "archive")
    first = run_experiment(mini_config(tmp_path, output_dir=str(tmp_path / "o1")))
    second = run_experiment(mini_config(tmp_path, output_dir=str(tmp_path / "o2")))
    csv1 = (tmp_path / "o1" / "results.csv").read_text()
    csv2 = (tmp_path / "o2" / "results.csv").read_text()
    assert csv1 == csv2  # same config => byte-identical matrix

    # simulate a crash: keep only records of the first dataset, then resume
    records_path = tmp_path / "o1" / "records.jsonl"
    kept = [
        line
        for line in records_path.read_text().splitlines()
        if json.loads(line)["dataset"] == "SineA"
    ]
    records_path.write_text("\n".join(kept) + "\n")
    resumed = run_experiment(mini_config(tmp_path, output_dir=str(tmp_path / "o1")))
    assert resumed.ok
    assert (tmp_path / "o1" / "results.csv").read_text() == csv1
    assert np.array_equal(resumed.matrix.values, first.matrix.values)


def test_run_experiment_records_failures_without_aborting(tmp_path):
    write_mini_archive(tmp_path / "archive", names=("SineA",))
    cfg = mini_config(
        tmp_path,
        datasets=("SineA", "MissingSet"),
        archive_url="http://127.0.0.1:9",  # closed port: fetch must fail fast
    )
    result = run_experiment(cfg)
    assert not result.ok
    failed_datasets = {f["dataset"] for f in result.failures}
    assert failed_datasets == {"MissingSet"}
    # the healthy dataset is fully populated, the broken one is NaN
    assert np.isfinite(result.matrix.values[0]).all()
    assert np.isnan(result.matrix.values[1]).all()


def test_run_experiment_workers_match_sequential(tmp_path):
    write_mini_archive(tmp_path / "archive")
    seq = run_experiment(mini_config(tmp_path, output_dir=str(tmp_path / "s")))
    par = run_experiment(mini_config(tmp_path, output_dir=str(tmp_path / "p"), workers=3))
    assert np.array_equal(seq.matrix.values, par.matrix.values)


def test_sweep_algorithm_failure_is_per_cell(tmp_path):
    # a dataset too short for rocket kernels fails that cell only
    root = tmp_path / "archive"
    d = root / "Tiny"
    d.mkdir(parents=True)
    save_ts_file(make_sine_dataset(8, length=5, name="Tiny"), d / "Tiny_TRAIN.ts")
    save_ts_file(
        make_sine_dataset(4, length=5, name="Tiny", split="test"), d / "Tiny_TEST.ts"
    )
    cfg = mini_config(tmp_path, datasets=("Tiny",), runs=2)
    result = run_experiment(cfg)
    assert {f["algorithm"] for f in result.failures} == {"rocket-tiny"}
    assert np.isfinite(result.matrix.values[0, 0])
    assert np.isnan(result.matrix.values[0, 1])


# ---------------------------------------------------------------- fetch


class _CountingHandler(http.server.SimpleHTTPRequestHandler):
    hits = []

    def log_message(self, *args):
        pass

    def do_GET(self):
        type(self).hits.append(self.path)
        super().do_GET()


@pytest.fixture
def archive_server(tmp_path):
    site = tmp_path / "site"
    site.mkdir()
    ds = make_sine_dataset(6, length=20, name="Remote")
    save_ts_file(ds, site / "Remote_TRAIN.ts")
    save_ts_file(
        make_sine_dataset(3, length=20, name="Remote", split="test"),
        site / "Remote_TEST.ts",
    )
    (site / "Broken_TRAIN.ts").write_text("this is not a ts file at all")
    (site / "Broken_TEST.ts").write_text("neither is this")
    handler = functools.partial(_CountingHandler, directory=str(site))
    server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _CountingHandler.hits = []
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()


def test_fetch_downloads_verifies_and_caches(tmp_path, archive_server):
    cache = tmp_path / "cache"
    train, test = fetch_dataset("Remote", cache, archive_server)
    assert train.exists() and test.exists()
    hits_after_first = len(_CountingHandler.hits)
    assert hits_after_first == 2
    # cache hit: no further network traffic
    fetch_dataset("Remote", cache, archive_server)
    assert len(_CountingHandler.hits) == hits_after_first


def test_fetch_unknown_name_is_network_error_with_url(tmp_path, archive_server):
    with pytest.raises(NetworkError) as err:
        fetch_dataset("DoesNotExist", tmp_path / "cache", archive_server)
    assert "DoesNotExist_TRAIN.ts" in str(err.value)


def test_fetch_corrupted_download(tmp_path, archive_server):
    with pytest.raises(ParseFailureAfterDownloadError):
        fetch_dataset("Broken", tmp_path / "cache", archive_server)
    # nothing half-written left in the cache
    assert not list((tmp_path / "cache" / "Broken").glob("*.ts"))


def test_resolve_dataset_directory_and_name(tmp_path):
    write_mini_archive(tmp_path / "archive", names=("SineA",))
    name, train, test = resolve_dataset(str(tmp_path / "archive" / "SineA"))
    assert name == "SineA" and train.exists() and test.exists()
    name, train, test = resolve_dataset(
        "SineA", data_dir=tmp_path / "archive", allow_fetch=False
    )
    assert name == "SineA"
    with pytest.raises(DatasetNotFoundError):
        resolve_dataset("Nope", data_dir=tmp_path / "archive", allow_fetch=False)


def test_data_dir_env_override(tmp_path, monkeypatch):
    from tserbench.experiment import default_data_dir

    monkeypatch.setenv("TSERBENCH_DATA_DIR", str(tmp_path / "custom"))
    assert default_data_dir() == tmp_path / "custom"
    monkeypatch.delenv("TSERBENCH_DATA_DIR")
    assert "tserbench" in str(default_data_dir())
