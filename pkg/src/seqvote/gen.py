"""Instance generators.

Three families:

* spatial instances — voters and alternatives as points in the plane, with
  distance-driven approvals, under four named voter-location distributions;
* uniform-random instances for property testing;
* a hard family on which no decision sequence can satisfy a slack-tightened
  proportionality demand, plus an adaptive adversary that defeats any rule
  deciding rounds one at a time.

Everything is a deterministic function of its configuration, including the
seed.  Randomness comes from numpy's PCG64 with explicit stream splitting:
voter i's location stream is spawned with key (0, i) and round j's
alternative stream with key (1, j), so instances are reproducible across
platforms and trivially parallelizable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Sequence

import numpy as np

from .axioms import AxiomReport, VariantSpec, check_variant
from .core import (
    BadConfig,
    DecisionInstance,
    SeqvoteError,
    make_instance,
    utility_vector,
)
from .rules import OnlineRule, PhragmenState

__all__ = [
    "GuardExceeded",
    "ConstructionFailed",
    "DISTRIBUTION_NAMES",
    "EuclideanConfig",
    "gen_euclidean",
    "gen_random",
    "voter_locations",
    "CounterexampleConfig",
    "gen_counterexample",
    "AdversaryOutcome",
    "adversary_online",
]


class GuardExceeded(SeqvoteError, RuntimeError):
    """A generator hit its resource guard (alternative count or resampling)."""


class ConstructionFailed(SeqvoteError, RuntimeError):
    """The adaptive adversary could not complete its construction.

    The counting argument guarantees enough unsatisfied voters, so this
    signals an implementation bug, not a user error.
    """


# ---------------------------------------------------------------------------
# Spatial (Euclidean) instances
# ---------------------------------------------------------------------------

# Per distribution: (group weight, center) pairs, the default standard
# deviation, and whether locations are resampled into [-1, 1]².
_DISTRIBUTIONS: dict[str, tuple[tuple[tuple[Fraction, tuple[float, float]], ...], float, bool]] = {
    "restricted": (
        (
            (Fraction(1, 3), (-0.5, -0.5)),
            (Fraction(2, 3), (0.5, 0.5)),
        ),
        0.2,
        True,
    ),
    "many-groups": (
        (
            (Fraction(1, 5), (-0.5, -0.5)),
            (Fraction(1, 5), (-0.5, 0.5)),
            (Fraction(1, 5), (0.5, -0.5)),
            (Fraction(2, 5), (0.5, 0.5)),
        ),
        0.2,
        False,
    ),
    "unbalanced": (
        (
            (Fraction(1, 5), (-0.5, -0.5)),
            (Fraction(4, 5), (0.5, 0.5)),
        ),
        0.1,
        False,
    ),
    "balanced-nearby": (
        (
            (Fraction(3, 5), (-0.25, 0.0)),
            (Fraction(2, 5), (0.25, 0.0)),
        ),
        0.2,
        False,
    ),
}

DISTRIBUTION_NAMES = tuple(_DISTRIBUTIONS)

_RESAMPLE_CAP = 10_000


@dataclass(frozen=True)
class EuclideanConfig:
    """Configuration for spatial instances.

    Voters are split into groups by the distribution's weights
    (largest-remainder rounding) and placed by bivariate normals around the
    group centers.  Each round draws `alternatives_per_round` points uniformly
    in [-1, 1]²; a voter approves every alternative within `approval_factor`
    times the distance to their closest one, so approval sets are never
    empty.  `sigma` overrides the distribution's default standard deviation
    (0.2, except 0.1 for the unbalanced distribution).
    """

    distribution: str
    num_voters: int
    num_rounds: int
    alternatives_per_round: int
    approval_factor: float = 1.0
    sigma: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.distribution not in _DISTRIBUTIONS:
            raise BadConfig(
                f"unknown distribution {self.distribution!r}; "
                f"expected one of {DISTRIBUTION_NAMES}"
            )
        if self.num_voters < 1 or self.num_rounds < 1 or self.alternatives_per_round < 1:
            raise BadConfig("voters, rounds and alternatives must all be ≥ 1")
        if not self.approval_factor >= 1:
            raise BadConfig(
                f"approval_factor must be ≥ 1, got {self.approval_factor}"
            )
        if self.sigma is not None and not self.sigma > 0:
            raise BadConfig(f"sigma must be > 0, got {self.sigma}")
        if not (0 <= int(self.seed) < 2**64):
            raise BadConfig("seed must be a 64-bit non-negative integer")

    @property
    def effective_sigma(self) -> float:
        if self.sigma is not None:
            return self.sigma
        return _DISTRIBUTIONS[self.distribution][1]


def _voter_stream(seed: int, voter: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(0, voter)))
    )


def _round_stream(seed: int, round_index: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(1, round_index)))
    )


def _allocate_groups(num_voters: int, weights: Sequence[Fraction]) -> list[int]:
    """Largest-remainder rounding of num_voters · weight per group."""
    quotas = [w * num_voters for w in weights]
    counts = [q.numerator // q.denominator for q in quotas]
    remainders = [q - c for q, c in zip(quotas, counts)]
    leftover = num_voters - sum(counts)
    order = sorted(range(len(weights)), key=lambda g: (-remainders[g], g))
    for g in order[:leftover]:
        counts[g] += 1
    return counts


def _sample_location(
    rng: np.random.Generator, center: tuple[float, float], sigma: float, clip: bool
) -> tuple[float, float]:
    for _ in range(_RESAMPLE_CAP):
        x, y = rng.normal(center, sigma)
        if not clip or (-1.0 <= x <= 1.0 and -1.0 <= y <= 1.0):
            return float(x), float(y)
    raise GuardExceeded(
        f"voter location resampling did not land in [-1, 1]² "
        f"within {_RESAMPLE_CAP} draws"
    )


def voter_locations(config: EuclideanConfig) -> list[tuple[float, float]]:
    """The voter points the generator would use (exposed for inspection)."""
    groups, _, clip = _DISTRIBUTIONS[config.distribution]
    counts = _allocate_groups(config.num_voters, [w for w, _ in groups])
    sigma = config.effective_sigma
    locations: list[tuple[float, float]] = []
    voter = 0
    for (weight, center), count in zip(groups, counts):
        for _ in range(count):
            rng = _voter_stream(config.seed, voter)
            locations.append(_sample_location(rng, center, sigma, clip))
            voter += 1
    return locations


def gen_euclidean(config: EuclideanConfig) -> DecisionInstance:
    """Generate a spatial instance (deterministic given the config)."""
    points = np.array(voter_locations(config))
    rounds = []
    for j in range(config.num_rounds):
        rng = _round_stream(config.seed, j)
        alts = rng.uniform(-1.0, 1.0, size=(config.alternatives_per_round, 2))
        # distances[i][c] = |voter i − alternative c|
        diffs = points[:, None, :] - alts[None, :, :]
        distances = np.sqrt((diffs * diffs).sum(axis=2))
        cutoffs = distances.min(axis=1) * config.approval_factor
        approvals = [
            [int(c) for c in np.nonzero(distances[i] <= cutoffs[i])[0]]
            for i in range(config.num_voters)
        ]
        labels = [f"c{c}" for c in range(config.alternatives_per_round)]
        rounds.append((labels, approvals))
    return make_instance(config.num_voters, rounds)


def gen_random(
    num_voters: int,
    num_rounds: int,
    alternatives_per_round: int,
    p_approve: float,
    seed: int,
) -> DecisionInstance:
    """Each voter approves each alternative independently with `p_approve`."""
    if num_voters < 1 or num_rounds < 1 or alternatives_per_round < 1:
        raise BadConfig("voters, rounds and alternatives must all be ≥ 1")
    if not (0 < p_approve <= 1):
        raise BadConfig(f"p_approve must be in (0, 1], got {p_approve}")
    if not (0 <= int(seed) < 2**64):
        raise BadConfig("seed must be a 64-bit non-negative integer")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    rounds = []
    labels = [f"c{c}" for c in range(alternatives_per_round)]
    for _ in range(num_rounds):
        hits = rng.random((num_voters, alternatives_per_round)) < p_approve
        approvals = [
            [int(c) for c in np.nonzero(hits[i])[0]] for i in range(num_voters)
        ]
        rounds.append((labels, approvals))
    return make_instance(num_voters, rounds)


# ---------------------------------------------------------------------------
# Hard instances: no sequence satisfies the slack-tightened demand
# ---------------------------------------------------------------------------


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


@dataclass(frozen=True)
class CounterexampleConfig:
    """Parameters for the hard-instance construction.

    With slack `epsilon` ∈ (0, 1), `agreement_rounds` > ⌈(1−ε)/ε⌉ early
    rounds, a `horizon` strictly longer than that, and enough voters
    (`num_voters` defaults to the minimum ⌈k(T+1)/(ε(k+1)−1)⌉ for k early
    rounds and horizon T), the first k rounds offer one alternative per
    voter subset of size s = ⌈(1−ε)n/k⌉ (approved by exactly that subset)
    and the remaining rounds offer one singleton per voter.  Any decision
    sequence then satisfies at most k·s + (T−k) < n voters at all, so some
    size-s group with k agreement rounds ends up entirely unsatisfied —
    violating the ε-slack variant at level 1.

    `guard` caps the per-round alternative count C(n, s).
    """

    epsilon: Fraction
    agreement_rounds: int
    horizon: int
    num_voters: int | None = None
    guard: int = 1_000_000

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if not (0 < self.epsilon < 1):
            raise BadConfig(f"epsilon must be in (0, 1), got {self.epsilon}")
        k = self.agreement_rounds
        if k <= _ceil((1 - self.epsilon) / self.epsilon):
            raise BadConfig(
                f"agreement_rounds must exceed ⌈(1−ε)/ε⌉ = "
                f"{_ceil((1 - self.epsilon) / self.epsilon)}, got {k}"
            )
        if self.horizon <= k:
            raise BadConfig(
                f"horizon must exceed agreement_rounds, got "
                f"{self.horizon} ≤ {k}"
            )
        minimal = self.minimal_voters
        if self.num_voters is None:
            object.__setattr__(self, "num_voters", minimal)
        elif Fraction(self.num_voters) < self._exact_minimal():
            raise BadConfig(
                f"num_voters must be at least {minimal} for these parameters"
            )

    def _exact_minimal(self) -> Fraction:
        k, T = self.agreement_rounds, self.horizon
        return Fraction(k * (T + 1)) / (self.epsilon * (k + 1) - 1)

    @property
    def minimal_voters(self) -> int:
        return _ceil(self._exact_minimal())

    @property
    def group_size(self) -> int:
        """Size of the voter subsets offered in the early rounds."""
        assert self.num_voters is not None
        return _ceil((1 - self.epsilon) * self.num_voters / self.agreement_rounds)


def _subset_rounds(
    config: CounterexampleConfig,
) -> tuple[list[str], list[list[int]], dict[tuple[int, ...], int]]:
    """The shared early-round slate: one alternative per size-s subset."""
    n, s = config.num_voters, config.group_size
    count = comb(n, s)
    if max(count, n) > config.guard:
        raise GuardExceeded(
            f"the construction needs {max(count, n)} alternatives in one "
            f"round, above the guard of {config.guard}"
        )
    labels = [f"g{idx}" for idx in range(count)]
    approvals: list[list[int]] = [[] for _ in range(n)]
    index_of: dict[tuple[int, ...], int] = {}
    for idx, subset in enumerate(combinations(range(n), s)):
        index_of[subset] = idx
        for voter in subset:
            approvals[voter].append(idx)
    return labels, approvals, index_of


def gen_counterexample(config: CounterexampleConfig) -> DecisionInstance:
    """Build the hard instance described on :class:`CounterexampleConfig`."""
    n, T, k = config.num_voters, config.horizon, config.agreement_rounds
    labels, approvals, _ = _subset_rounds(config)
    rounds: list[tuple[list[str], list[list[int]]]] = [
        (labels, approvals) for _ in range(k)
    ]
    singleton_labels = [f"v{i}" for i in range(n)]
    singleton_approvals = [[i] for i in range(n)]
    for _ in range(k, T):
        rounds.append((singleton_labels, singleton_approvals))
    return make_instance(n, rounds)


# ---------------------------------------------------------------------------
# Adaptive adversary against online rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdversaryOutcome:
    """Result of running the adaptive adversary.

    `instance` is the completed instance (early rounds and singleton rounds
    as in the hard construction, final round adapted to the rule's play);
    `decisions` is the rule's full sequence on it; `report` shows the
    ε-slack violation; `witness_decisions` is a sequence constructed to
    satisfy the same axiom on the same instance, certified by
    `witness_report` — proving the failure is the rule's fault, not the
    instance's.
    """

    instance: DecisionInstance
    decisions: list[int]
    report: AxiomReport
    witness_decisions: list[int]
    witness_report: AxiomReport


def adversary_online(
    rule_factory: Callable[[int, int], OnlineRule],
    config: CounterexampleConfig,
) -> AdversaryOutcome:
    """Defeat a rule that must decide each round before seeing the next.

    The adversary plays the hard construction's first T−1 rounds, watches
    the rule's decisions, and picks s+1 voters left completely unsatisfied
    (the counting bound guarantees they exist).  The final round gives those
    voters pairwise disjoint singletons — the rule can help at most one —
    and everyone else one common alternative, so some size-s group still
    ends with zero satisfaction while a clairvoyant sequence satisfies the
    axiom.

    `rule_factory(num_voters, horizon)` builds the online rule under test
    (e.g. ``lambda n, T: PhragmenState(n)``).
    """
    n, T, k = config.num_voters, config.horizon, config.agreement_rounds
    s = config.group_size
    labels, approvals, index_of = _subset_rounds(config)
    singleton_labels = [f"v{i}" for i in range(n)]
    singleton_approvals = [[i] for i in range(n)]

    rounds: list[tuple[list[str], list[list[int]]]] = []
    for j in range(T - 1):
        if j < k:
            rounds.append((labels, approvals))
        else:
            rounds.append((singleton_labels, singleton_approvals))

    rule = rule_factory(n, T)
    prefix_instance = make_instance(n, rounds)
    decisions = [rule.decide(round_) for round_ in prefix_instance.rounds]

    prefix_utilities = utility_vector(prefix_instance, decisions)
    unsatisfied = [i for i in range(n) if prefix_utilities[i] == 0]
    if len(unsatisfied) < s + 1:
        raise ConstructionFailed(
            f"expected at least {s + 1} unsatisfied voters after {T - 1} "
            f"rounds, found {len(unsatisfied)}"
        )
    chosen = unsatisfied[: s + 1]

    final_labels = [f"u{i}" for i in chosen] + ["c"]
    common_index = len(chosen)
    final_approvals: list[list[int]] = []
    position = {voter: t for t, voter in enumerate(chosen)}
    for i in range(n):
        if i in position:
            final_approvals.append([position[i]])
        else:
            final_approvals.append([common_index])
    rounds.append((final_labels, final_approvals))

    instance = make_instance(n, rounds)
    decisions.append(rule.decide(instance.rounds[-1]))

    spec = VariantSpec(size_slack=config.epsilon, agreement_threshold="actual",
                       satisfaction_target="ell")
    report = check_variant(instance, decisions, spec, voter_limit=n)

    # A clairvoyant sequence: cover the chosen voters with two early-round
    # subsets, satisfy everyone else with the common final alternative.
    witness = [0] * T
    first_subset = tuple(sorted(chosen[:s]))
    witness[0] = index_of[first_subset]
    leftover = chosen[s]
    fill = [i for i in range(n) if i != leftover][: s - 1]
    second_subset = tuple(sorted(fill + [leftover]))
    if k > 1:
        witness[1] = index_of[second_subset]
    witness[T - 1] = common_index
    witness_report = check_variant(instance, witness, spec, voter_limit=n)

    return AdversaryOutcome(instance, decisions, report, witness, witness_report)
