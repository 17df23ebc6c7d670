import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tserbench import (
    TimeSeriesDataset,
    TimeSeriesInstance,
    load_ts_file,
    parse_ts,
    save_ts_file,
    serialize_ts,
    validate_dataset,
)
from tserbench.errors import (
    HeaderMismatchError,
    MissingTargetLabelError,
    TsSyntaxError,
)

MINIMAL = "@problemName toy\n@targetlabel true\n@data\n1.0,2.0,3.0:4.0,5.0,6.0:7.5\n"


def datasets_equal(a: TimeSeriesDataset, b: TimeSeriesDataset) -> bool:
    return (
        a.name == b.name
        and len(a) == len(b)
        and all(x.values_equal(y) for x, y in zip(a.instances, b.instances))
    )


def test_parse_minimal():
    ds = parse_ts(MINIMAL)
    assert ds.name == "toy"
    assert len(ds) == 1
    inst = ds.instances[0]
    assert inst.n_dimensions == 2
    assert inst.dimensions[0].tolist() == [1.0, 2.0, 3.0]
    assert inst.dimensions[1].tolist() == [4.0, 5.0, 6.0]
    assert inst.target == 7.5


def test_parse_missing_values():
    ds = parse_ts("@problemName m\n@targetlabel true\n@data\n1.0,?,3.0:0.5\n")
    inst = ds.instances[0]
    assert inst.n_dimensions == 1
    assert np.isnan(inst.dimensions[0][1])
    assert inst.target == 0.5
    assert ds.has_missing


def test_parse_requires_target_field():
    with pytest.raises(TsSyntaxError) as err:
        parse_ts("@problemName t\n@targetlabel true\n@data\n1.0,2.0\n")
    assert "target" in err.value.reason
    assert err.value.line == 4


def test_parse_rejects_missing_target_value():
    with pytest.raises(TsSyntaxError):
        parse_ts("@problemName t\n@targetlabel true\n@data\n1.0,2.0:?\n")


def test_parse_requires_targetlabel():
    with pytest.raises(MissingTargetLabelError):
        parse_ts("@problemName t\n@data\n1.0:2.0\n")
    with pytest.raises(MissingTargetLabelError):
        parse_ts("@problemName t\n@targetlabel false\n@data\n1.0:2.0\n")


def test_parse_header_case_insensitive_and_crlf():
    text = "@PROBLEMNAME Up\r\n@TargetLabel TRUE\r\n@data\r\n1.0:2.0\r\n"
    ds = parse_ts(text)
    assert ds.name == "Up"
    assert ds.instances[0].target == 2.0


def test_parse_comments_and_blanks():
    text = "# a comment\n\n@problemName c\n@targetlabel true\n\n@data\n# mid comment\n1.0:2.0\n\n"
    assert len(parse_ts(text)) == 1


def test_unknown_directive_warns_not_fails():
    with pytest.warns(UserWarning, match="unknown directive"):
        ds = parse_ts("@problemName u\n@frobnicate yes\n@targetlabel true\n@data\n1.0:2.0\n")
    assert len(ds) == 1


def test_header_mismatch_dimensions():
    text = "@problemName h\n@dimensions 3\n@targetlabel true\n@data\n1.0:2.0:9.0\n"
    with pytest.raises(HeaderMismatchError):
        parse_ts(text)


def test_header_mismatch_univariate():
    text = "@problemName h\n@univariate true\n@targetlabel true\n@data\n1.0:2.0:9.0\n"
    with pytest.raises(HeaderMismatchError):
        parse_ts(text)


def test_header_mismatch_series_length():
    text = (
        "@problemName h\n@equalLength true\n@seriesLength 4\n@targetlabel true\n"
        "@data\n1.0,2.0:9.0\n"
    )
    with pytest.raises(HeaderMismatchError):
        parse_ts(text)


def test_ragged_dimensions_accepted():
    # per-instance ragged dimensions (e.g. 256- and 512-point channels) are
    # a parse-level feature; cross-instance consistency is validate's job
    text = "@problemName r\n@targetlabel true\n@data\n1.0,2.0:1.0,2.0,3.0,4.0:0.1\n"
    ds = parse_ts(text)
    assert ds.instances[0].lengths == (2, 4)
    assert validate_dataset(ds).ok


def test_positioned_error_on_bad_number():
    with pytest.raises(TsSyntaxError) as err:
        parse_ts("@problemName p\n@targetlabel true\n@data\n1.0,zap,3.0:0.5\n")
    assert err.value.line == 4
    assert err.value.column == 5


def test_serialize_contains_expected_line():
    ds = parse_ts(MINIMAL)
    text = serialize_ts(ds)
    assert "1.0,2.0,3.0:4.0,5.0,6.0:7.5" in text
    assert "@targetLabel true" in text


def test_serialize_missing_flag_and_tokens():
    ds = TimeSeriesDataset("m", [TimeSeriesInstance([[1.0, np.nan]], 0.25)])
    text = serialize_ts(ds)
    assert "@missing true" in text
    assert "1.0,?:0.25" in text


def test_serialize_empty_dataset_rejected_on_reload():
    ds = TimeSeriesDataset("none", [])
    back = parse_ts(serialize_ts(ds))
    assert len(back) == 0
    assert not validate_dataset(back).ok


def test_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(7)
    instances = [
        TimeSeriesInstance(
            [rng.normal(size=5) * 10.0 ** rng.integers(-8, 8), rng.normal(size=3)],
            rng.normal(),
        )
        for _ in range(10)
    ]
    # sprinkle missing values
    dims = [d.copy() for d in instances[3].dimensions]
    dims[0][2] = np.nan
    instances[3] = TimeSeriesInstance(dims, instances[3].target)
    ds = TimeSeriesDataset("roundtrip", instances)
    assert datasets_equal(ds, parse_ts(serialize_ts(ds)))
    path = tmp_path / "roundtrip_TEST.ts"
    save_ts_file(ds, path)
    back = load_ts_file(path)
    assert back.split == "test"
    assert datasets_equal(ds, back)


@st.composite
def small_datasets(draw):
    n_dims = draw(st.integers(1, 3))
    lengths = draw(st.lists(st.integers(1, 6), min_size=n_dims, max_size=n_dims))
    n_inst = draw(st.integers(1, 5))
    values = st.one_of(
        st.floats(-1e12, 1e12, allow_nan=False),
        st.just(float("nan")),
    )
    instances = []
    for _ in range(n_inst):
        dims = [
            draw(st.lists(values, min_size=lengths[j], max_size=lengths[j]))
            for j in range(n_dims)
        ]
        target = draw(st.floats(-1e12, 1e12, allow_nan=False))
        instances.append(TimeSeriesInstance(dims, target))
    name = draw(st.text(st.characters(min_codepoint=33, max_codepoint=126), min_size=1, max_size=12))
    return TimeSeriesDataset(name.strip() or "x", instances)


@given(small_datasets())
@settings(max_examples=60, deadline=None)
def test_roundtrip_property(ds):
    assert datasets_equal(ds, parse_ts(serialize_ts(ds)))


_FUZZ_ALPHABET = "0123456789.,:?@#\n\r eE+-_abcdata@problemName targetlabel true false"


@given(st.text(alphabet=_FUZZ_ALPHABET, max_size=120))
@settings(max_examples=300, deadline=None)
def test_parser_total_on_fuzzed_text(text):
    import warnings

    from tserbench.errors import TserBenchError

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            ds = parse_ts(text)
            assert isinstance(ds, TimeSeriesDataset)
        except TserBenchError:
            pass  # positioned rejection is the other legal outcome


def test_parse_bytes():
    ds = parse_ts(MINIMAL.encode("utf-8"))
    assert ds.name == "toy"
    with pytest.raises(TsSyntaxError):
        parse_ts(b"\xff\xfe\x00bad")


def test_cached_archive_files_match_published_metadata():
    """Parsed real archive datasets report exactly the published shape
    (train/test sizes, lengths, dimensions, missing flag)."""
    from tserbench.experiment import default_data_dir
    from tserbench.reference import ARCHIVE_DATASETS

    cached = {
        path.parent.name
        for path in default_data_dir().glob("*/*_TRAIN.ts")
        if (path.parent / f"{path.parent.name}_TEST.ts").exists()
    }
    known = sorted(cached & set(ARCHIVE_DATASETS))
    if not known:
        pytest.skip(f"no cached archive datasets under {default_data_dir()}")
    for name in known:
        info = ARCHIVE_DATASETS[name]
        base = default_data_dir() / name
        train = load_ts_file(base / f"{name}_TRAIN.ts")
        test = load_ts_file(base / f"{name}_TEST.ts")
        assert train.n_instances == info.train_size
        assert test.n_instances == info.test_size
        assert train.n_dimensions == info.n_dimensions
        assert sorted(train.dimension_lengths) == sorted(info.lengths)
        assert train.has_missing == info.has_missing or test.has_missing == info.has_missing
