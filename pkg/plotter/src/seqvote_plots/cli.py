"""Command-line front end for the chart renderer.

    seqvote-plot RESULTS.csv --out FIGURE.png [--rules av,rr,...]
                 [--metrics avg_utility,gini] [--format png|svg|pdf]

Reads an experiment results CSV and writes one figure with a horizontal
bar panel per metric (bar = median across trials, error bars = 25th to
75th percentile, mean annotated after the bar).  Prints a JSON summary
of what was drawn on success.  Requested rules missing from the CSV are
reported as warnings on stderr.  All failures exit with code 2 and a
diagnostic naming the error type.
"""

from __future__ import annotations

import argparse
import json
import sys

from .chart import (
    ChartError,
    ChartSpec,
    IMAGE_FORMATS,
    METRICS,
    render,
)

__all__ = ["build_parser", "main"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqvote-plot",
        description=(
            "Render an experiment results CSV as grouped horizontal bar "
            "charts: one panel per metric, one bar per rule at the median "
            "across trials, error bars at the 25th/75th percentiles, and "
            "the mean annotated after the bar."
        ),
    )
    parser.add_argument(
        "csv",
        help="experiment results CSV (header: rule,trial,avg_utility,p25_utility,gini)",
    )
    parser.add_argument(
        "--out",
        required=True,
        help="output image path (.png, .svg, or .pdf)",
    )
    parser.add_argument(
        "--rules",
        help="comma-separated rule labels in display order (default: CSV order)",
    )
    parser.add_argument(
        "--metrics",
        help=f"comma-separated metric panels (default: {','.join(METRICS)})",
    )
    parser.add_argument(
        "--format",
        dest="image_format",
        choices=IMAGE_FORMATS,
        help="image format (default: inferred from the --out suffix)",
    )
    return parser


def _split_csv_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    try:
        spec = ChartSpec(
            source=args.csv,
            out=args.out,
            metrics=_split_csv_list(args.metrics) if args.metrics is not None else METRICS,
            rules=_split_csv_list(args.rules) if args.rules is not None else None,
            image_format=args.image_format,
        )
        result = render(spec)
    except ChartError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    for rule in result.summary.missing_rules:
        print(f"warning: rule {rule!r} is not present in the CSV", file=sys.stderr)
    payload = {
        "out": str(result.out),
        "format": result.image_format,
        "metrics": list(result.metrics),
        "rules": list(result.summary.rules),
        "missing_rules": list(result.summary.missing_rules),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
