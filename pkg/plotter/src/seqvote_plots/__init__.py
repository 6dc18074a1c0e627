"""Chart rendering for sequential approval-voting experiment CSVs.

Turns the experiment runner's per-(rule, trial) metric CSV into grouped
horizontal bar charts: one panel per metric, one bar per rule at the
median across trials, error bars spanning the 25th to 75th percentile
(nearest rank), and the mean annotated after each bar.
"""

from .chart import (
    CSV_COLUMNS,
    IMAGE_FORMATS,
    METRICS,
    METRIC_TITLES,
    BadSpec,
    ChartError,
    ChartSpec,
    EmptyInput,
    FormatError,
    MetricStats,
    MissingColumn,
    RenderResult,
    Summary,
    TrialRow,
    build_figure,
    nearest_rank,
    read_rows,
    render,
    summarize,
)
from .cli import main

__version__ = "0.1.0"
