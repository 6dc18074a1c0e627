"""Utility-distribution metrics for evaluating decision sequences.

All metrics consume a per-voter utility vector (see
:func:`seqvote.core.utility_vector`) together with the round count, and
return plain floats.  Normalized utility means utility divided by the number
of rounds, so every metric lives on a [0, 1]-ish scale regardless of the
horizon.
"""

from __future__ import annotations

import math
from typing import Sequence

from .core import InstanceError

__all__ = [
    "average_utility",
    "percentile_utility",
    "gini_coefficient",
    "nearest_rank",
]


def _check(utilities: Sequence[int], num_rounds: int) -> None:
    if len(utilities) == 0:
        raise InstanceError("utility vector is empty")
    if num_rounds < 1:
        raise InstanceError("round count must be positive")


def average_utility(utilities: Sequence[int], num_rounds: int) -> float:
    """Mean normalized utility: (Σ utilities) / (n · T)."""
    _check(utilities, num_rounds)
    return sum(utilities) / (len(utilities) * num_rounds)


def nearest_rank(sorted_values: Sequence[float], fraction: float) -> float:
    """Nearest-rank (lower) percentile of an ascending-sorted sequence.

    Returns the value at 1-based rank ``ceil(fraction * len)``, the smallest
    element such that at least a `fraction` share of the data is ≤ it.
    """
    if not sorted_values:
        raise InstanceError("percentile of an empty sequence")
    if not (0 < fraction <= 1):
        raise InstanceError("percentile fraction must be in (0, 1]")
    rank = math.ceil(fraction * len(sorted_values))
    return sorted_values[max(rank, 1) - 1]


def percentile_utility(
    utilities: Sequence[int], num_rounds: int, fraction: float = 0.25
) -> float:
    """Nearest-rank percentile of the normalized utility distribution.

    With the default `fraction` of 0.25 this is the 25th-percentile voter's
    normalized utility — a floor-of-the-worse-off measure.
    """
    _check(utilities, num_rounds)
    normalized = sorted(u / num_rounds for u in utilities)
    return nearest_rank(normalized, fraction)


def gini_coefficient(utilities: Sequence[int], num_rounds: int) -> float:
    """Gini coefficient of the utility distribution (0 = perfectly even).

    Computed as Σ_i Σ_j |u_i − u_j| / (2 · n · Σ u), and defined as 0.0 when
    every utility is zero.  Scale-invariant, so normalization cancels.
    """
    _check(utilities, num_rounds)
    total = sum(utilities)
    if total == 0:
        return 0.0
    n = len(utilities)
    # O(n log n): for ascending u, Σ_i Σ_j |u_i − u_j| = 2 Σ_i (2i − n + 1) u_i.
    ordered = sorted(utilities)
    abs_diff_sum = 2 * sum((2 * i - n + 1) * u for i, u in enumerate(ordered))
    return abs_diff_sum / (2 * n * total)
