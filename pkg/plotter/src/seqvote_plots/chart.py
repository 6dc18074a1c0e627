"""Grouped horizontal bar charts for sequential-voting experiment results.

The experiment runner writes one CSV row per (rule, trial) with three
metric columns — average per-round utility, 25th-percentile voter
utility, and the Gini coefficient — alongside a summary JSON.  This
module renders those rows as the matching figure: one aligned panel per
metric, one horizontal bar per rule whose length is the median across
trials, error bars spanning the 25th to 75th percentile (nearest rank,
the same convention the runner uses), and the mean annotated after the
bar to two decimals.

All statistics are recomputed here from the CSV alone, so a figure is a
pure function of the CSV bytes and the chart spec; on the same CSV they
agree with the runner's summary JSON because both sides apply identical
float arithmetic to identical values.  Styling (colors, bar height,
fonts) is fixed by this module and not configurable.
"""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib
from matplotlib.figure import Figure

__all__ = [
    "CSV_COLUMNS",
    "METRICS",
    "METRIC_TITLES",
    "IMAGE_FORMATS",
    "ChartError",
    "BadSpec",
    "MissingColumn",
    "EmptyInput",
    "FormatError",
    "ChartSpec",
    "TrialRow",
    "MetricStats",
    "Summary",
    "RenderResult",
    "read_rows",
    "nearest_rank",
    "summarize",
    "build_figure",
    "render",
]

#: Exact header the experiment runner writes, in order.
CSV_COLUMNS: tuple[str, ...] = ("rule", "trial", "avg_utility", "p25_utility", "gini")

#: Metric columns, in default panel order.
METRICS: tuple[str, ...] = ("avg_utility", "p25_utility", "gini")

#: Human-readable panel titles.
METRIC_TITLES: Mapping[str, str] = {
    "avg_utility": "Average utility",
    "p25_utility": "25th percentile utility",
    "gini": "Gini coefficient",
}

#: Output formats with deterministic byte output.
IMAGE_FORMATS: tuple[str, ...] = ("png", "svg", "pdf")


class ChartError(Exception):
    """Base class for chart construction and rendering failures."""


class BadSpec(ChartError, ValueError):
    """Raised when a chart spec field is invalid."""


class MissingColumn(ChartError):
    """Raised when the CSV header is not the exact runner header."""


class EmptyInput(ChartError):
    """Raised when there is nothing to chart: an empty CSV, a CSV with
    no data rows, or a rule selection matching none of its rows."""


class FormatError(ChartError):
    """Raised when a CSV data row is malformed."""


@dataclass(frozen=True)
class TrialRow:
    """One parsed CSV data row: one rule evaluated on one trial."""

    rule: str
    trial: int
    avg_utility: float
    p25_utility: float
    gini: float

    def value(self, metric: str) -> float:
        """The named metric column of this row."""
        if metric not in METRICS:
            raise BadSpec(f"unknown metric {metric!r}; expected one of {METRICS}")
        return getattr(self, metric)


@dataclass(frozen=True)
class ChartSpec:
    """What to render: source CSV, panel metrics, rule display order,
    and the output image path/format.

    ``rules=None`` keeps every rule in CSV first-appearance order; an
    explicit tuple fixes the display order, and requested rules absent
    from the CSV are reported on the result rather than silently
    dropped.  ``image_format=None`` infers the format from the output
    suffix, defaulting to PNG.
    """

    source: Path
    out: Path
    metrics: tuple[str, ...] = METRICS
    rules: tuple[str, ...] | None = None
    image_format: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "source", Path(self.source))
        object.__setattr__(self, "out", Path(self.out))
        metrics = tuple(self.metrics)
        if not metrics:
            raise BadSpec("at least one metric panel is required")
        for metric in metrics:
            if metric not in METRICS:
                raise BadSpec(
                    f"unknown metric {metric!r}; expected one of {METRICS}"
                )
        if len(set(metrics)) != len(metrics):
            raise BadSpec("duplicate metrics in panel list")
        object.__setattr__(self, "metrics", metrics)
        if self.rules is not None:
            rules = tuple(self.rules)
            if not rules:
                raise BadSpec("rule selection must be non-empty when given")
            if any(not isinstance(rule, str) or not rule for rule in rules):
                raise BadSpec("rule labels must be non-empty strings")
            if len(set(rules)) != len(rules):
                raise BadSpec("duplicate rule labels in selection")
            object.__setattr__(self, "rules", rules)
        fmt = self.image_format
        if fmt is None:
            fmt = self.out.suffix.lstrip(".").lower() or "png"
        fmt = fmt.lower()
        if fmt not in IMAGE_FORMATS:
            raise BadSpec(
                f"unsupported image format {fmt!r}; expected one of {IMAGE_FORMATS}"
            )
        object.__setattr__(self, "image_format", fmt)


@dataclass(frozen=True)
class MetricStats:
    """Per-rule distribution of one metric across trials."""

    median: float
    p25: float
    p75: float
    mean: float


@dataclass(frozen=True)
class Summary:
    """Per-rule, per-metric statistics in display order, plus any
    requested rules that the CSV did not contain."""

    stats: dict[str, dict[str, MetricStats]]
    missing_rules: tuple[str, ...] = ()

    @property
    def rules(self) -> tuple[str, ...]:
        """Rule labels in display order."""
        return tuple(self.stats)


@dataclass(frozen=True)
class RenderResult:
    """Where the figure went and the statistics drawn into it."""

    out: Path
    image_format: str
    metrics: tuple[str, ...]
    summary: Summary


def read_rows(source: str | Path) -> list[TrialRow]:
    """Parse an experiment CSV into trial rows.

    The header must be exactly :data:`CSV_COLUMNS`; every data row must
    carry a non-empty rule label, an integer trial index, and finite
    floats for the three metrics.  Blank lines are ignored.
    """
    source = Path(source)
    with open(source, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInput(f"{source}: file is empty") from None
        if tuple(header) != CSV_COLUMNS:
            absent = [column for column in CSV_COLUMNS if column not in header]
            if absent:
                raise MissingColumn(
                    f"{source}: header lacks column(s) {', '.join(absent)}"
                )
            raise MissingColumn(
                f"{source}: header must be exactly {','.join(CSV_COLUMNS)}, "
                f"got {','.join(header)}"
            )
        rows: list[TrialRow] = []
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(CSV_COLUMNS):
                raise FormatError(
                    f"{source}:{lineno}: expected {len(CSV_COLUMNS)} fields, "
                    f"got {len(record)}"
                )
            rule, trial_text, *metric_text = record
            if not rule:
                raise FormatError(f"{source}:{lineno}: empty rule label")
            try:
                trial = int(trial_text)
                values = [float(text) for text in metric_text]
            except ValueError as err:
                raise FormatError(f"{source}:{lineno}: {err}") from None
            if any(not math.isfinite(value) for value in values):
                raise FormatError(
                    f"{source}:{lineno}: metric values must be finite"
                )
            rows.append(TrialRow(rule, trial, *values))
    if not rows:
        raise EmptyInput(f"{source}: no data rows")
    return rows


def nearest_rank(sorted_values: Sequence[float], fraction: float) -> float:
    """Nearest-rank (lower) percentile of an ascending-sorted sequence:
    the value at 1-based rank ``ceil(fraction * len)``, matching the
    experiment runner's summary convention."""
    if not sorted_values:
        raise EmptyInput("percentile of an empty sequence")
    if not 0 < fraction <= 1:
        raise BadSpec("percentile fraction must be in (0, 1]")
    rank = math.ceil(fraction * len(sorted_values))
    return sorted_values[max(rank, 1) - 1]


def summarize(
    rows: Sequence[TrialRow],
    rules: Sequence[str] | None = None,
    metrics: Sequence[str] = METRICS,
) -> Summary:
    """Group rows by rule and reduce each metric to median, 25th/75th
    percentile (nearest rank), and mean — the runner's own reductions.

    ``rules=None`` keeps CSV first-appearance order; otherwise the given
    order is used and absent rules are returned in ``missing_rules``.
    """
    metrics = tuple(metrics)
    for metric in metrics:
        if metric not in METRICS:
            raise BadSpec(f"unknown metric {metric!r}; expected one of {METRICS}")
    if not rows:
        raise EmptyInput("no rows to summarize")

    by_rule: dict[str, list[TrialRow]] = {}
    for row in rows:
        by_rule.setdefault(row.rule, []).append(row)

    missing: tuple[str, ...] = ()
    if rules is None:
        selected = list(by_rule)
    else:
        selected = [rule for rule in rules if rule in by_rule]
        missing = tuple(rule for rule in rules if rule not in by_rule)
        if not selected:
            raise EmptyInput(
                "none of the requested rules appear in the CSV: "
                + ", ".join(rules)
            )

    stats: dict[str, dict[str, MetricStats]] = {}
    for rule in selected:
        per_metric: dict[str, MetricStats] = {}
        for metric in metrics:
            values = sorted(row.value(metric) for row in by_rule[rule])
            per_metric[metric] = MetricStats(
                median=statistics.median(values),
                p25=nearest_rank(values, 0.25),
                p75=nearest_rank(values, 0.75),
                mean=statistics.fmean(values),
            )
        stats[rule] = per_metric
    return Summary(stats=stats, missing_rules=missing)


#: Fixed styling — deliberately not configurable.
_BAR_HEIGHT = 0.6
_PALETTE: tuple[tuple[float, ...], ...] = tuple(matplotlib.colormaps["tab10"].colors)
_PANEL_WIDTH = 3.4
_MEAN_FONT_SIZE = 8
_SVG_HASH_SALT = "seqvote-plots"

#: Per-format savefig metadata overrides that strip timestamps so that
#: re-rendering the same input produces identical bytes.
_DETERMINISTIC_METADATA: Mapping[str, Mapping[str, None]] = {
    "svg": {"Date": None},
    "pdf": {"CreationDate": None},
}


def build_figure(summary: Summary, metrics: Sequence[str] = METRICS) -> Figure:
    """Lay out one horizontal-bar panel per metric from a summary.

    Each panel draws, top to bottom in display order, a bar per rule at
    the median, black error bars from the 25th to the 75th percentile,
    and the mean printed after the bar to two decimals.  The layout is a
    deterministic function of the summary alone.
    """
    metrics = tuple(metrics)
    rules = summary.rules
    if not rules:
        raise EmptyInput("no rules to draw")
    for metric in metrics:
        if any(metric not in summary.stats[rule] for rule in rules):
            raise BadSpec(f"summary lacks metric {metric!r}")

    positions = list(range(len(rules)))
    colors = [_PALETTE[i % len(_PALETTE)] for i in positions]
    figure = Figure(
        figsize=(_PANEL_WIDTH * len(metrics), 0.55 * len(rules) + 1.6)
    )
    axes = figure.subplots(1, len(metrics), sharey=True, squeeze=False)[0]
    for ax, metric in zip(axes, metrics):
        stats = [summary.stats[rule][metric] for rule in rules]
        medians = [s.median for s in stats]
        below = [s.median - s.p25 for s in stats]
        above = [s.p75 - s.median for s in stats]
        ax.barh(positions, medians, height=_BAR_HEIGHT, color=colors, zorder=2)
        ax.errorbar(
            medians,
            positions,
            xerr=[below, above],
            fmt="none",
            ecolor="black",
            elinewidth=1.0,
            capsize=3,
            zorder=3,
        )
        upper = max(max(s.median, s.p75) for s in stats)
        if upper <= 0:
            upper = 1.0
        ax.set_xlim(0, upper * 1.3)
        for y, s in zip(positions, stats):
            ax.text(
                max(s.median, s.p75) + upper * 0.04,
                y,
                format(s.mean, ".2f"),
                va="center",
                fontsize=_MEAN_FONT_SIZE,
            )
        ax.set_title(METRIC_TITLES[metric], fontsize=10)
        ax.set_axisbelow(True)
        ax.grid(axis="x", linewidth=0.4, alpha=0.5)
        ax.tick_params(labelsize=9)
    axes[0].set_yticks(positions, labels=list(rules))
    axes[0].invert_yaxis()
    figure.tight_layout()
    return figure


def render(spec: ChartSpec) -> RenderResult:
    """Read the CSV, summarize it, and write the figure described by
    ``spec``, creating parent directories as needed.  Returns the output
    location together with the statistics that were drawn."""
    rows = read_rows(spec.source)
    summary = summarize(rows, rules=spec.rules, metrics=spec.metrics)
    with matplotlib.rc_context({"svg.hashsalt": _SVG_HASH_SALT}):
        figure = build_figure(summary, spec.metrics)
        spec.out.parent.mkdir(parents=True, exist_ok=True)
        figure.savefig(
            spec.out,
            format=spec.image_format,
            dpi=150,
            metadata=_DETERMINISTIC_METADATA.get(spec.image_format),
        )
    return RenderResult(
        out=spec.out,
        image_format=spec.image_format,
        metrics=spec.metrics,
        summary=summary,
    )
