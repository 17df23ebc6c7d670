"""Reader and writer for the ``.ts`` text dataset format.

The grammar follows the public time series archive convention. A file is a
sequence of header directives followed by a data section::

    # comment lines and blank lines are ignored
    @problemName Covid3Month
    @timeStamps false
    @missing false
    @univariate true
    @dimensions 1
    @equalLength true
    @seriesLength 84
    @targetLabel true
    @data
    1.0,2.0,3.0:0.5

Directive keys are matched case-insensitively; unknown directives produce a
warning instead of an error so that archive revisions keep loading. After
``@data`` each line encodes one instance: dimensions separated by ``:``,
values within a dimension separated by ``,``, ``?`` for a missing value, and
the final ``:``-field is the scalar target. ``@targetLabel true`` is the one
mandatory directive; files carrying class labels instead of targets are
rejected.

Numbers are parsed as 64-bit floats and re-emitted in shortest round-trip
decimal form, so ``parse_ts(serialize_ts(ds))`` reproduces ``ds`` exactly,
including missing-value positions. Both LF and CRLF input are accepted; LF
is emitted.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

from .data import TimeSeriesDataset, TimeSeriesInstance
from .errors import HeaderMismatchError, MissingTargetLabelError, TsSyntaxError

__all__ = [
    "TsHeader",
    "parse_ts",
    "serialize_ts",
    "load_ts_file",
    "save_ts_file",
]

_KNOWN_DIRECTIVES = {
    "problemname",
    "timestamps",
    "missing",
    "univariate",
    "dimension",
    "dimensions",
    "equallength",
    "serieslength",
    "targetlabel",
    "data",
}


@dataclass
class TsHeader:
    """Parsed header directives of a ``.ts`` file."""

    problem_name: str = ""
    timestamps_flag: bool = False
    missing_flag: bool = False
    univariate_flag: bool = False
    dimensions: int | None = None
    equal_length_flag: bool = False
    series_length: int | None = None
    target_label_flag: bool = False


def _parse_bool(token: str, line_no: int, col: int) -> bool:
    low = token.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    raise TsSyntaxError(line_no, col, f"expected 'true' or 'false', got {token!r}")


def _parse_int(token: str, line_no: int, col: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise TsSyntaxError(line_no, col, f"expected an integer, got {token!r}") from None


def _parse_value(token: str, line_no: int, col: int) -> float:
    if token == "?":
        return math.nan
    try:
        return float(token)
    except ValueError:
        raise TsSyntaxError(line_no, col, f"expected a number or '?', got {token!r}") from None


def _parse_directive(header: TsHeader, line: str, line_no: int) -> None:
    body = line[1:]
    key, _, value = body.partition(" ")
    key_low = key.strip().lower()
    value = value.strip()
    col = len(key) + 2  # 1-based position where the value starts

    if key_low not in _KNOWN_DIRECTIVES:
        warnings.warn(f"line {line_no}: unknown directive '@{key}' ignored", stacklevel=4)
        return
    if key_low == "problemname":
        if not value:
            raise TsSyntaxError(line_no, col, "@problemName requires a value")
        header.problem_name = value
    elif key_low == "timestamps":
        header.timestamps_flag = _parse_bool(value, line_no, col)
        if header.timestamps_flag:
            raise TsSyntaxError(
                line_no, col, "timestamped files are not supported; values are index-based"
            )
    elif key_low == "missing":
        header.missing_flag = _parse_bool(value, line_no, col)
    elif key_low == "univariate":
        header.univariate_flag = _parse_bool(value, line_no, col)
    elif key_low in ("dimension", "dimensions"):
        header.dimensions = _parse_int(value, line_no, col)
    elif key_low == "equallength":
        header.equal_length_flag = _parse_bool(value, line_no, col)
    elif key_low == "serieslength":
        header.series_length = _parse_int(value, line_no, col)
    elif key_low == "targetlabel":
        header.target_label_flag = _parse_bool(value, line_no, col)


def _parse_data_line(line: str, line_no: int) -> TimeSeriesInstance:
    fields = line.split(":")
    if len(fields) < 2:
        raise TsSyntaxError(line_no, len(line) + 1, "expected target field after ':'")

    target_token = fields[-1].strip()
    target_col = line.rfind(":") + 2
    if not target_token:
        raise TsSyntaxError(line_no, target_col, "expected target field")
    if target_token == "?":
        raise TsSyntaxError(line_no, target_col, "target value may not be missing")
    target = _parse_value(target_token, line_no, target_col)

    dims = []
    col = 1
    for field in fields[:-1]:
        stripped = field.strip()
        if not stripped:
            raise TsSyntaxError(line_no, col, "empty dimension")
        values = []
        vcol = col
        for token in field.split(","):
            values.append(_parse_value(token.strip(), line_no, vcol))
            vcol += len(token) + 1
        dims.append(values)
        col += len(field) + 1
    return TimeSeriesInstance(dims, target)


def _check_header(header: TsHeader, instances: list[TimeSeriesInstance]) -> None:
    if not header.target_label_flag:
        raise MissingTargetLabelError("'@targetlabel true' is required for regression files")
    if header.equal_length_flag and header.series_length is None and instances:
        # tolerated: infer the length from the data instead of failing
        header.series_length = instances[0].lengths[0]
    if not instances:
        return

    dim_counts = {inst.n_dimensions for inst in instances}
    if header.dimensions is not None and dim_counts != {header.dimensions}:
        raise HeaderMismatchError(
            f"header declares {header.dimensions} dimensions but data has {sorted(dim_counts)}"
        )
    if header.univariate_flag and dim_counts != {1}:
        raise HeaderMismatchError(
            f"header declares a univariate problem but data has {sorted(dim_counts)} dimensions"
        )
    all_lengths = {length for inst in instances for length in inst.lengths}
    if header.series_length is not None and all_lengths != {header.series_length}:
        raise HeaderMismatchError(
            f"header declares series length {header.series_length} "
            f"but data has lengths {sorted(all_lengths)}"
        )
    if header.equal_length_flag and len(all_lengths) > 1:
        raise HeaderMismatchError(
            f"header declares equal lengths but data has lengths {sorted(all_lengths)}"
        )


def parse_ts(text: str | bytes, split: str = "train") -> TimeSeriesDataset:
    """Parse ``.ts`` text into a dataset.

    Every input either yields a dataset or raises a positioned error
    (:class:`TsSyntaxError`, :class:`HeaderMismatchError` or
    :class:`MissingTargetLabelError`); the parser does not crash on
    malformed input. The train/test role is not part of the format, so it
    is supplied by the caller (file loaders infer it from the filename).
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TsSyntaxError(1, 1, f"not valid UTF-8: {exc.reason}") from None

    header = TsHeader()
    instances: list[TimeSeriesInstance] = []
    in_data = False

    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r").strip()
        if not line or line.startswith("#"):
            continue
        if not in_data and line.startswith("@"):
            if line.lower() == "@data":
                in_data = True
                continue
            if line.lower().startswith("@data "):
                raise TsSyntaxError(line_no, 6, "@data takes no value")
            _parse_directive(header, line, line_no)
            continue
        if not in_data:
            raise TsSyntaxError(line_no, 1, "data line before '@data'")
        try:
            instances.append(_parse_data_line(line, line_no))
        except TsSyntaxError:
            raise
        except ValueError as exc:
            raise TsSyntaxError(line_no, 1, str(exc)) from None

    if not in_data:
        raise TsSyntaxError(max(1, text.count("\n") + 1), 1, "missing '@data' section")
    _check_header(header, instances)
    name = header.problem_name or "unnamed"
    return TimeSeriesDataset(name, instances, split=split)


def _format_value(value: float) -> str:
    if math.isnan(value):
        return "?"
    return repr(float(value))


def serialize_ts(ds: TimeSeriesDataset) -> str:
    """Render a dataset as ``.ts`` text; the exact inverse of :func:`parse_ts`."""
    lines = [
        f"@problemName {ds.name}",
        "@timeStamps false",
        f"@missing {'true' if ds.has_missing else 'false'}",
        f"@univariate {'true' if ds.n_dimensions == 1 else 'false'}",
        f"@dimensions {ds.n_dimensions}",
        f"@equalLength {'true' if ds.equal_length else 'false'}",
    ]
    if ds.equal_length:
        lines.append(f"@seriesLength {ds.series_length}")
    lines.append("@targetLabel true")
    lines.append("@data")
    for inst in ds.instances:
        fields = [",".join(_format_value(v) for v in dim) for dim in inst.dimensions]
        fields.append(_format_value(inst.target))
        lines.append(":".join(fields))
    return "\n".join(lines) + "\n"


def load_ts_file(path: str | Path, split: str | None = None) -> TimeSeriesDataset:
    """Load a ``.ts`` file; the split is inferred from a ``_TRAIN``/``_TEST`` suffix."""
    path = Path(path)
    if split is None:
        stem = path.stem.upper()
        split = "test" if stem.endswith("_TEST") else "train"
    return parse_ts(path.read_text(encoding="utf-8"), split=split)


def save_ts_file(ds: TimeSeriesDataset, path: str | Path) -> None:
    Path(path).write_text(serialize_ts(ds), encoding="utf-8")
