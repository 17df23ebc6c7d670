"""Exception types shared across the package."""


class TserBenchError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatchError(TserBenchError, ValueError):
    """Two series (or a model and its input) disagree on dimensions or lengths."""


class NonFiniteError(TserBenchError, ValueError):
    """An input contains NaN or infinite values where finite values are required."""


class AllMissingDimensionError(TserBenchError, ValueError):
    """A dimension consists entirely of missing values; interpolation is undefined."""


class MissingValuesError(TserBenchError, ValueError):
    """Missing values are present but the operation requires interpolated data."""


class InvalidDatasetError(TserBenchError, ValueError):
    """A dataset failed validation and was rejected by a fit/predict entry point."""


class KTooLargeError(TserBenchError, ValueError):
    """Requested neighbour or component count exceeds what the data supports."""


class SeriesTooShortError(TserBenchError, ValueError):
    """A series is too short for the requested convolution kernel."""


class DegenerateSystemError(TserBenchError, ValueError):
    """A linear system has no usable columns."""


class InvalidBasisSizeError(TserBenchError, ValueError):
    """Requested spline basis size is incompatible with the degree."""


class LengthMismatchError(TserBenchError, ValueError):
    """Two vectors that must be the same length are not."""


class EmptyInputError(TserBenchError, ValueError):
    """An operation received an empty input where at least one element is required."""


class TooFewAlgorithmsError(TserBenchError, ValueError):
    """The statistical test needs more algorithms (columns)."""


class TooFewDatasetsError(TserBenchError, ValueError):
    """The statistical test needs more datasets (rows)."""


class UnsupportedKError(TserBenchError, ValueError):
    """No critical value is tabulated for this number of algorithms."""


class UnsupportedAlphaError(TserBenchError, ValueError):
    """No critical value is tabulated for this significance level."""


class TsSyntaxError(TserBenchError, ValueError):
    """Malformed text in a ``.ts`` file, with a 1-based position."""

    def __init__(self, line: int, column: int, reason: str):
        self.line = line
        self.column = column
        self.reason = reason
        super().__init__(f"line {line}, column {column}: {reason}")


class HeaderMismatchError(TserBenchError, ValueError):
    """Header directives of a ``.ts`` file contradict the data section."""


class MissingTargetLabelError(TserBenchError, ValueError):
    """A ``.ts`` file lacks the ``@targetlabel true`` directive."""


class DatasetNotFoundError(TserBenchError, ValueError):
    """A named dataset could not be resolved to files."""


class NetworkError(TserBenchError, RuntimeError):
    """A download failed."""


class ParseFailureAfterDownloadError(TserBenchError, RuntimeError):
    """A downloaded file did not parse as a valid dataset."""


class InconsistentRecordsError(TserBenchError, ValueError):
    """Run records cannot be aggregated (missing or contradictory entries)."""


class AlgorithmFailure(TserBenchError, RuntimeError):
    """A single benchmark cell failed; carries enough context to record it."""

    def __init__(self, dataset: str, algorithm: str, cause: BaseException | str):
        self.dataset = dataset
        self.algorithm = algorithm
        self.cause = str(cause)
        super().__init__(f"{algorithm} failed on {dataset}: {self.cause}")
