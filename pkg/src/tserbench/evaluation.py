"""Metrics, ranking and statistical comparison of algorithms.

The evaluation protocol: collect one RMSE per (dataset, algorithm) cell,
rank algorithms per dataset with fractional ranks (rank 1 = lowest RMSE,
ties share the mean of the spanned positions), average ranks over datasets,
test the ranks with the Friedman chi-square statistic, and when the null is
rejected compare pairs with the two-tailed Nemenyi critical difference.
A critical-difference diagram places algorithms on a rank axis and joins
groups whose pairwise rank gaps all stay below the critical difference.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import fdtrc, gammaincc

from .errors import (
    EmptyInputError,
    LengthMismatchError,
    NonFiniteError,
    TooFewAlgorithmsError,
    TooFewDatasetsError,
    UnsupportedAlphaError,
    UnsupportedKError,
)

__all__ = [
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
]


def rmse(predictions, targets) -> float:
    """Root mean squared error ``sqrt(mean((prediction - target)^2))``."""
    predictions = np.asarray(predictions, dtype=np.float64).ravel()
    targets = np.asarray(targets, dtype=np.float64).ravel()
    if predictions.size != targets.size:
        raise LengthMismatchError(
            f"{predictions.size} predictions vs {targets.size} targets"
        )
    if predictions.size == 0:
        raise EmptyInputError("need at least one prediction")
    residuals = predictions - targets
    return float(np.sqrt(np.mean(residuals * residuals)))


def _median(values: np.ndarray) -> float:
    """Median with the even-count convention: mean of the two central values."""
    ordered = np.sort(values)
    mid = ordered.size // 2
    if ordered.size % 2 == 1:
        return float(ordered[mid])
    return float((ordered[mid - 1] + ordered[mid]) / 2.0)


def scaled_rmse(value: float, all_values) -> float:
    """Relative score ``value / (value + median(all_values))``.

    0.5 marks average performance for the dataset; smaller is better. When
    both the value and the median are zero the score is 0.5 by continuity.
    """
    all_values = np.asarray(all_values, dtype=np.float64).ravel()
    if all_values.size == 0:
        raise EmptyInputError("need at least one value to take a median over")
    if value < 0 or (all_values < 0).any():
        raise ValueError("scaled_rmse is defined for non-negative values")
    med = _median(all_values)
    denom = value + med
    if denom == 0.0:
        return 0.5
    return float(value / denom)


def fractional_ranks(row) -> np.ndarray:
    """Ascending ranks; tied values share the mean of the positions they span."""
    values = np.asarray(row, dtype=np.float64).ravel()
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


@dataclass(frozen=True)
class ResultsMatrix:
    """Per-dataset x per-algorithm RMSE values, averaged over runs.

    ``per_run`` optionally keeps the raw per-run values with shape
    (datasets, algorithms, runs). Cells of failed benchmark runs may hold
    NaN; ranking refuses such matrices.
    """

    dataset_names: tuple[str, ...]
    algorithm_names: tuple[str, ...]
    values: np.ndarray
    per_run: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (len(self.dataset_names), len(self.algorithm_names)):
            raise ValueError(
                f"values shape {values.shape} does not match "
                f"{len(self.dataset_names)} datasets x {len(self.algorithm_names)} algorithms"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dataset_names", tuple(self.dataset_names))
        object.__setattr__(self, "algorithm_names", tuple(self.algorithm_names))
        if self.per_run is not None:
            per_run = np.asarray(self.per_run, dtype=np.float64)
            if per_run.shape[:2] != values.shape:
                raise ValueError("per_run leading shape must match values")
            object.__setattr__(self, "per_run", per_run)

    @property
    def n_datasets(self) -> int:
        return len(self.dataset_names)

    @property
    def n_algorithms(self) -> int:
        return len(self.algorithm_names)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["dataset", *self.algorithm_names])
        for name, row in zip(self.dataset_names, self.values):
            writer.writerow([name, *[repr(float(v)) for v in row]])
        return buffer.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ResultsMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or len(rows[0]) < 2 or rows[0][0] != "dataset":
            raise ValueError("expected a header row 'dataset,<algorithm...>'")
        algorithms = tuple(rows[0][1:])
        names = []
        values = []
        for row in rows[1:]:
            if not row:
                continue
            if len(row) != len(algorithms) + 1:
                raise ValueError(f"row for {row[0]!r} has {len(row) - 1} values, "
                                 f"expected {len(algorithms)}")
            names.append(row[0])
            values.append([float(v) for v in row[1:]])
        return cls(tuple(names), algorithms, np.array(values, dtype=np.float64))

    def to_json(self) -> str:
        payload = {
            "datasets": list(self.dataset_names),
            "algorithms": list(self.algorithm_names),
            "rmse": self.values.tolist(),
            "per_run": self.per_run.tolist() if self.per_run is not None else None,
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ResultsMatrix":
        payload = json.loads(text)
        per_run = payload.get("per_run")
        return cls(
            tuple(payload["datasets"]),
            tuple(payload["algorithms"]),
            np.array(payload["rmse"], dtype=np.float64),
            np.array(per_run, dtype=np.float64) if per_run is not None else None,
        )


@dataclass(frozen=True)
class RankTable:
    """Fractional ranks per dataset plus the per-algorithm averages."""

    dataset_names: tuple[str, ...]
    algorithm_names: tuple[str, ...]
    ranks: np.ndarray  # (N, k)
    average_ranks: np.ndarray  # (k,)

    @property
    def n_datasets(self) -> int:
        return len(self.dataset_names)

    @property
    def n_algorithms(self) -> int:
        return len(self.algorithm_names)

    def critical_difference(self, alpha: float = 0.05) -> float:
        """Nemenyi critical difference for this table's k and N."""
        return nemenyi_cd(self.n_algorithms, self.n_datasets, alpha)


def rank_table(results: ResultsMatrix) -> RankTable:
    """Rank every dataset row; rank 1 goes to the lowest RMSE."""
    if not np.isfinite(results.values).all():
        raise NonFiniteError("results matrix contains non-finite cells; cannot rank")
    ranks = np.vstack([fractional_ranks(row) for row in results.values])
    return RankTable(
        results.dataset_names,
        results.algorithm_names,
        ranks,
        ranks.mean(axis=0),
    )


@dataclass(frozen=True)
class FriedmanResult:
    statistic: float
    p_value: float
    # the F-distributed refinement of the chi-square statistic, reported as
    # a secondary diagnostic
    iman_davenport: float
    iman_davenport_p: float


def friedman_test(table: RankTable) -> FriedmanResult:
    """Friedman chi-square test over the rank table.

    ``chi2 = 12N / (k(k+1)) * (sum_j Rbar_j^2 - k(k+1)^2 / 4)`` with the
    p-value from the chi-square survival function with k-1 degrees of
    freedom (a regularized incomplete gamma).
    """
    n, k = table.ranks.shape
    if k < 3:
        raise TooFewAlgorithmsError(f"need at least 3 algorithms, got {k}")
    if n < 2:
        raise TooFewDatasetsError(f"need at least 2 datasets, got {n}")
    mean_ranks = table.average_ranks
    statistic = 12.0 * n / (k * (k + 1)) * (
        float(np.sum(mean_ranks**2)) - k * (k + 1) ** 2 / 4.0
    )
    statistic = max(statistic, 0.0)  # guard tiny negative round-off on all-tied input
    p_value = float(gammaincc((k - 1) / 2.0, statistic / 2.0))

    id_denom = n * (k - 1) - statistic
    if id_denom <= 0:
        iman = math.inf
        iman_p = 0.0
    else:
        iman = (n - 1) * statistic / id_denom
        iman_p = float(fdtrc(k - 1, (k - 1) * (n - 1), iman))
    return FriedmanResult(statistic, p_value, iman, iman_p)


# two-tailed Nemenyi critical values at alpha = 0.05, indexed by the number
# of algorithms k = 2..20
_NEMENYI_Q_05 = {
    2: 1.960, 3: 2.343, 4: 2.569, 5: 2.728, 6: 2.850, 7: 2.949, 8: 3.031,
    9: 3.102, 10: 3.164, 11: 3.219, 12: 3.268, 13: 3.313, 14: 3.354,
    15: 3.391, 16: 3.426, 17: 3.458, 18: 3.489, 19: 3.517, 20: 3.544,
}


def nemenyi_cd(k: int, n_datasets: int, alpha: float = 0.05) -> float:
    """Critical difference ``q_alpha * sqrt(k(k+1) / (6N))``."""
    if alpha != 0.05:
        raise UnsupportedAlphaError(f"critical values are tabulated for alpha=0.05, got {alpha}")
    if k not in _NEMENYI_Q_05:
        raise UnsupportedKError(f"critical values are tabulated for k in 2..20, got {k}")
    if n_datasets < 1:
        raise ValueError(f"n_datasets must be >= 1, got {n_datasets}")
    return _NEMENYI_Q_05[k] * math.sqrt(k * (k + 1) / (6.0 * n_datasets))


@dataclass(frozen=True)
class CdDiagram:
    """Rendered critical-difference diagram plus machine-checkable views."""

    svg: str
    summary: str
    cliques: tuple[tuple[str, ...], ...]


def _maximal_cliques(sorted_ranks: np.ndarray, cd: float) -> list[tuple[int, int]]:
    """Maximal index runs [i, j] with rank_j - rank_i < cd, over sorted ranks.

    Connectivity is an interval graph on the sorted ranks, so maximal
    cliques are exactly the maximal runs. Only runs of two or more count.
    """
    k = sorted_ranks.size
    runs: list[tuple[int, int]] = []
    right = 0
    for left in range(k):
        right = max(right, left)
        while right + 1 < k and sorted_ranks[right + 1] - sorted_ranks[left] < cd:
            right += 1
        if right > left and (not runs or right > runs[-1][1]):
            runs.append((left, right))
    return runs


def render_cd_diagram(table: RankTable, cd: float) -> CdDiagram:
    """Draw the rank axis, labelled average ranks, and clique bars as SVG.

    The layout is deterministic: algorithms are sorted by average rank
    (ties by name), coordinates are fixed-precision, the font is always
    monospace. A plain-text adjacency summary accompanies the drawing.
    """
    order = sorted(
        range(table.n_algorithms),
        key=lambda j: (table.average_ranks[j], table.algorithm_names[j]),
    )
    names = [table.algorithm_names[j] for j in order]
    ranks = np.array([table.average_ranks[j] for j in order])
    k = len(names)
    runs = _maximal_cliques(ranks, cd)
    cliques = tuple(tuple(names[i] for i in range(lo, hi + 1)) for lo, hi in runs)

    lines = [f"k {k}", f"cd {cd:.6g}"]
    for name, rank in zip(names, ranks):
        lines.append(f"rank {rank:.6g} {name}")
    for members in cliques:
        lines.append("clique " + " ".join(members))
    summary = "\n".join(lines) + "\n"

    # geometry: the axis spans [rank 1, rank k]; labels alternate left/right
    width, margin = 640.0, 150.0
    axis_y = 40.0
    bar_gap = 12.0
    n_left = (k + 1) // 2
    label_step = 22.0
    axis_span = width - 2 * margin

    def x_of(rank: float) -> float:
        if k == 1:
            return margin
        return margin + (rank - 1.0) / (k - 1.0) * axis_span

    label_block_top = axis_y + bar_gap * (len(runs) + 1) + 16.0
    height = label_block_top + n_left * label_step + 30.0

    svg: list[str] = []
    svg.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">'
    )
    svg.append(
        '<style>text{font-family:monospace;font-size:12px;fill:#000;}</style>'
    )
    svg.append(
        f'<line x1="{x_of(1):.2f}" y1="{axis_y:.2f}" x2="{x_of(k):.2f}" '
        f'y2="{axis_y:.2f}" stroke="#000" stroke-width="1.5"/>'
    )
    for tick in range(1, k + 1):
        tx = x_of(tick)
        svg.append(
            f'<line x1="{tx:.2f}" y1="{axis_y - 5:.2f}" x2="{tx:.2f}" '
            f'y2="{axis_y:.2f}" stroke="#000" stroke-width="1"/>'
        )
        svg.append(
            f'<text x="{tx:.2f}" y="{axis_y - 10:.2f}" text-anchor="middle">{tick}</text>'
        )
    for level, (lo, hi) in enumerate(runs):
        by = axis_y + bar_gap * (level + 1)
        svg.append(
            f'<line x1="{x_of(ranks[lo]) - 3:.2f}" y1="{by:.2f}" '
            f'x2="{x_of(ranks[hi]) + 3:.2f}" y2="{by:.2f}" '
            f'stroke="#000" stroke-width="4"/>'
        )
    for position, (name, rank) in enumerate(zip(names, ranks)):
        on_left = position < n_left
        label_y = label_block_top + (position if on_left else position - n_left) * label_step
        label_x = margin - 12.0 if on_left else width - margin + 12.0
        anchor = "end" if on_left else "start"
        rank_x = x_of(rank)
        svg.append(
            f'<path d="M {rank_x:.2f} {axis_y:.2f} V {label_y - 4:.2f} '
            f'H {label_x:.2f}" fill="none" stroke="#666" stroke-width="0.8"/>'
        )
        svg.append(
            f'<text x="{label_x:.2f}" y="{label_y:.2f}" text-anchor="{anchor}">'
            f"{name} ({rank:.2f})</text>"
        )
    svg.append(
        f'<text x="{margin:.2f}" y="{height - 10:.2f}" text-anchor="start">'
        f"CD = {cd:.3f}</text>"
    )
    svg.append("</svg>")
    return CdDiagram("\n".join(svg) + "\n", summary, cliques)
