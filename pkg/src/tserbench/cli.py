"""Command-line entry point.

Subcommands: ``fetch`` downloads archive datasets into the local cache,
``run`` executes a sweep from a JSON config, ``evaluate`` turns a results
CSV into ranks plus the Friedman/Nemenyi analysis, ``diagram`` renders the
critical-difference diagram, and ``oracle-table`` emits the embedded
reference results. Exit codes: 0 success, 1 usage error, 2 data error,
3 partial failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import TserBenchError
from .evaluation import friedman_test, nemenyi_cd, rank_table, render_cd_diagram
from .evaluation import ResultsMatrix
from .experiment import (
    DEFAULT_ARCHIVE_URL,
    ExperimentConfig,
    fetch_dataset,
    run_experiment,
)
from .reference import reference_results

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PARTIAL = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; this harness reserves 2 for data
    # errors, so remap
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="tserbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    fetch = sub.add_parser("fetch", help="download datasets into the cache")
    fetch.add_argument("names", nargs="+", help="archive dataset names")
    fetch.add_argument("--data-dir", default=None, help="cache directory")
    fetch.add_argument("--base-url", default=DEFAULT_ARCHIVE_URL)

    run = sub.add_parser("run", help="run a benchmark sweep from a JSON config")
    run.add_argument("--config", required=True, help="path to the config file")

    evaluate = sub.add_parser("evaluate", help="ranks + Friedman + Nemenyi from a results CSV")
    evaluate.add_argument("--results", required=True, help="path to results.csv")
    evaluate.add_argument("--alpha", type=float, default=0.05)

    diagram = sub.add_parser("diagram", help="render a critical-difference diagram")
    diagram.add_argument("--results", required=True, help="path to results.csv")
    diagram.add_argument("--out", required=True, help="output SVG path")
    diagram.add_argument("--alpha", type=float, default=0.05)

    oracle = sub.add_parser("oracle-table", help="emit the embedded reference results")
    oracle.add_argument("--out", required=True, help="output CSV path")
    return parser


def _load_matrix(path: str) -> ResultsMatrix:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        return ResultsMatrix.from_json(text)
    return ResultsMatrix.from_csv(text)


def _cmd_fetch(args) -> int:
    status = EXIT_OK
    for name in args.names:
        try:
            train, test = fetch_dataset(name, args.data_dir, args.base_url)
        except TserBenchError as exc:
            print(f"{name}: {exc}", file=sys.stderr)
            status = EXIT_DATA
            continue
        print(f"{name}: {train} {test}")
    return status


def _cmd_run(args) -> int:
    try:
        cfg = ExperimentConfig.from_json(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, ValueError, TypeError) as exc:
        print(f"bad config {args.config}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    result = run_experiment(cfg)
    out_dir = Path(cfg.output_dir)
    print(f"wrote {out_dir / 'results.csv'} and {out_dir / 'results.json'}")
    if result.failures:
        for failure in result.failures:
            print(
                f"FAILED {failure['algorithm']} on {failure['dataset']}: {failure['error']}",
                file=sys.stderr,
            )
        return EXIT_PARTIAL
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    try:
        matrix = _load_matrix(args.results)
        table = rank_table(matrix)
    except (OSError, ValueError, TserBenchError) as exc:
        print(f"cannot evaluate {args.results}: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(f"datasets: {table.n_datasets}  algorithms: {table.n_algorithms}")
    print("average ranks (best first):")
    order = sorted(
        range(table.n_algorithms),
        key=lambda j: (table.average_ranks[j], table.algorithm_names[j]),
    )
    for j in order:
        print(f"  {table.average_ranks[j]:6.3f}  {table.algorithm_names[j]}")
    try:
        outcome = friedman_test(table)
        print(f"Friedman chi-square = {outcome.statistic:.4f}, p = {outcome.p_value:.4g}")
        print(
            f"Iman-Davenport F = {outcome.iman_davenport:.4f}, "
            f"p = {outcome.iman_davenport_p:.4g}"
        )
    except TserBenchError as exc:
        print(f"Friedman test not applicable: {exc}")
    try:
        cd = nemenyi_cd(table.n_algorithms, table.n_datasets, args.alpha)
        print(f"Nemenyi critical difference (alpha={args.alpha}) = {cd:.3f}")
    except TserBenchError as exc:
        print(f"Nemenyi CD not available: {exc}")
    return EXIT_OK


def _cmd_diagram(args) -> int:
    try:
        matrix = _load_matrix(args.results)
        table = rank_table(matrix)
        cd = nemenyi_cd(table.n_algorithms, table.n_datasets, args.alpha)
    except (OSError, ValueError, TserBenchError) as exc:
        print(f"cannot render {args.results}: {exc}", file=sys.stderr)
        return EXIT_DATA
    diagram = render_cd_diagram(table, cd)
    Path(args.out).write_text(diagram.svg, encoding="utf-8")
    print(diagram.summary, end="")
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_oracle_table(args) -> int:
    Path(args.out).write_text(reference_results().to_csv(), encoding="utf-8")
    print(f"wrote {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "fetch": _cmd_fetch,
        "run": _cmd_run,
        "evaluate": _cmd_evaluate,
        "diagram": _cmd_diagram,
        "oracle-table": _cmd_oracle_table,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
