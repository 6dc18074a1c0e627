"""Proportionality axioms and efficiency checks for decision sequences.

A voter group *agrees* in a round when some alternative is approved by every
member.  The checkers quantify over voter groups, so they are exponential in
the number of voters; `voter_limit` guards against accidental blow-ups.

Two satisfaction measures appear:

* share-style (justified / proportional families): the number of rounds whose
  decision is approved by *some* group member;
* member-style (extended families): the best utility of any single member.

Groups are enumerated by size ascending, then lexicographically, and the
first violation found is reported, so witnesses are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence, Union

from .core import (
    BadConfig,
    DecisionInstance,
    SearchBudgetExceeded,
    SeqvoteError,
    utility_vector,
    validate,
    validate_decisions,
)

__all__ = [
    "TooManyVoters",
    "BadSpec",
    "AxiomKind",
    "WEAK_JR",
    "JR",
    "WEAK_PJR",
    "PJR",
    "WEAK_EJR",
    "EJR",
    "AXIOM_BY_NAME",
    "GroupWitness",
    "QuotaWitness",
    "SequenceWitness",
    "AxiomReport",
    "check_representation",
    "VariantSpec",
    "check_variant",
    "find_closed_groups",
    "check_lower_quota_closed",
    "check_pareto",
    "DEFAULT_VOTER_LIMIT",
]

#: Checks enumerate voter groups (exponential); refuse above this many voters
#: unless the caller raises the limit explicitly.
DEFAULT_VOTER_LIMIT = 20


class TooManyVoters(SeqvoteError):
    """The instance exceeds the group-enumeration guard.

    Raise `voter_limit` to proceed anyway (runtime grows as 2^voters).
    """


class BadSpec(BadConfig):
    """A parameterized axiom was given out-of-range parameters."""


@dataclass(frozen=True)
class AxiomKind:
    """A representation axiom: a satisfaction family and a strength.

    `family` picks the satisfaction measure and demand cap: ``"jr"`` and
    ``"pjr"`` count rounds whose decision some group member approves (the
    justified variant caps the demand at 1); ``"ejr"`` uses the best single
    member's utility.  Weak axioms only constrain groups that agree in every
    round; full axioms constrain groups by their actual agreement count.
    """

    family: str
    weak: bool

    def __post_init__(self) -> None:
        if self.family not in ("jr", "pjr", "ejr"):
            raise BadConfig(f"unknown axiom family {self.family!r}")

    @property
    def name(self) -> str:
        return ("weak-" if self.weak else "") + self.family


WEAK_JR = AxiomKind("jr", weak=True)
JR = AxiomKind("jr", weak=False)
WEAK_PJR = AxiomKind("pjr", weak=True)
PJR = AxiomKind("pjr", weak=False)
WEAK_EJR = AxiomKind("ejr", weak=True)
EJR = AxiomKind("ejr", weak=False)

AXIOM_BY_NAME = {
    kind.name: kind for kind in (WEAK_JR, JR, WEAK_PJR, PJR, WEAK_EJR, EJR)
}


@dataclass(frozen=True)
class GroupWitness:
    """A group whose guaranteed satisfaction is not met.

    The group agrees in `agreement_rounds`, its size entitles it to `demand`
    satisfied rounds, but only `observed` were satisfied.
    """

    group: tuple[int, ...]
    agreement_rounds: tuple[int, ...]
    demand: int
    observed: int

    def to_dict(self) -> dict:
        return {
            "type": "group",
            "group": list(self.group),
            "agreement_rounds": list(self.agreement_rounds),
            "demand": self.demand,
            "observed": self.observed,
        }


@dataclass(frozen=True)
class QuotaWitness:
    """A closed-group member falling below the group's proportional quota
    over the first `prefix_rounds` rounds."""

    group: tuple[int, ...]
    member: int
    prefix_rounds: int
    quota: int
    observed: int

    def to_dict(self) -> dict:
        return {
            "type": "quota",
            "group": list(self.group),
            "member": self.member,
            "prefix_rounds": self.prefix_rounds,
            "quota": self.quota,
            "observed": self.observed,
        }


@dataclass(frozen=True)
class SequenceWitness:
    """An alternative decision sequence making every voter at least as well
    off and someone strictly better off."""

    decisions: tuple[int, ...]
    utilities: tuple[int, ...]
    base_utilities: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "type": "sequence",
            "decisions": list(self.decisions),
            "utilities": list(self.utilities),
            "base_utilities": list(self.base_utilities),
        }


Witness = Union[GroupWitness, QuotaWitness, SequenceWitness]


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of one axiom check; `witness` explains a failure."""

    axiom: str
    satisfied: bool
    witness: Witness | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "axiom": self.axiom,
            "satisfied": self.satisfied,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "detail": dict(self.detail),
        }


# ---------------------------------------------------------------------------
# Shared bit-level machinery
# ---------------------------------------------------------------------------


def _approval_masks(instance: DecisionInstance) -> list[list[int]]:
    """Per voter, per round: a bitmask over alternative indices."""
    masks = [[0] * instance.num_rounds for _ in range(instance.num_voters)]
    for j, round_ in enumerate(instance.rounds):
        for i, approved in enumerate(round_.approvals):
            bits = 0
            for alt in approved:
                bits |= 1 << alt
            masks[i][j] = bits
    return masks


def _satisfaction_bits(
    instance: DecisionInstance, decisions: Sequence[int | None]
) -> list[int]:
    """Per voter: a bitmask over rounds whose decision the voter approves."""
    bits = [0] * instance.num_voters
    for j, decided in enumerate(decisions):
        if decided is None:
            continue
        for i, approved in enumerate(instance.rounds[j].approvals):
            if decided in approved:
                bits[i] |= 1 << j
    return bits


def _agreement_bits(masks: list[list[int]], group: tuple[int, ...], T: int) -> int:
    """Bitmask over rounds in which the group has a common approval."""
    bits = 0
    for j in range(T):
        common = masks[group[0]][j]
        for i in group[1:]:
            common &= masks[i][j]
            if not common:
                break
        if common:
            bits |= 1 << j
    return bits


def _bits_to_rounds(bits: int) -> tuple[int, ...]:
    rounds = []
    j = 0
    while bits:
        if bits & 1:
            rounds.append(j)
        bits >>= 1
        j += 1
    return tuple(rounds)


def _check_limits(instance: DecisionInstance, voter_limit: int) -> None:
    if instance.num_voters > voter_limit:
        raise TooManyVoters(
            f"{instance.num_voters} voters exceeds the group-enumeration "
            f"guard of {voter_limit}; pass a larger voter_limit to override"
        )


# ---------------------------------------------------------------------------
# The six standard representation axioms
# ---------------------------------------------------------------------------


def check_representation(
    instance: DecisionInstance,
    decisions: Sequence[int | None],
    kind: AxiomKind,
    *,
    voter_limit: int = DEFAULT_VOTER_LIMIT,
) -> AxiomReport:
    """Check one of the six standard axioms against a decision sequence.

    A group of size s agreeing in k rounds (k must equal the full horizon
    for weak axioms) may demand floor(s·k / n) satisfied rounds — capped at
    1 for the justified family — under the family's satisfaction measure.
    The first violating group in enumeration order is the witness.
    """
    validate(instance)
    validate_decisions(instance, decisions)
    _check_limits(instance, voter_limit)
    n, T = instance.num_voters, instance.num_rounds
    masks = _approval_masks(instance)
    sat_bits = _satisfaction_bits(instance, decisions)
    member_style = kind.family == "ejr"
    groups_checked = 0

    for size in range(1, n + 1):
        # No demand is possible at this size even with full agreement.
        ceiling = (size * T) // n
        if ceiling < 1:
            continue
        for group in combinations(range(n), size):
            groups_checked += 1
            if member_style:
                observed = max(sat_bits[i].bit_count() for i in group)
            else:
                joint = 0
                for i in group:
                    joint |= sat_bits[i]
                observed = joint.bit_count()
            if observed >= ceiling:
                continue
            agreement = _agreement_bits(masks, group, T)
            k = agreement.bit_count()
            if kind.weak and k != T:
                continue
            if k == 0:
                continue
            demand = min((size * k) // n, k)  # the floor is already ≤ k
            if kind.family == "jr":
                demand = min(demand, 1)
            if demand >= 1 and observed < demand:
                return AxiomReport(
                    kind.name,
                    False,
                    GroupWitness(group, _bits_to_rounds(agreement), demand, observed),
                    {"groups_checked": groups_checked},
                )
    return AxiomReport(kind.name, True, None, {"groups_checked": groups_checked})


# ---------------------------------------------------------------------------
# Parameterized share-style variants
# ---------------------------------------------------------------------------

_THRESHOLDS = ("actual", "ell", "ell-over-alpha")
_TARGETS = ("ell", "alpha-ell")


@dataclass(frozen=True)
class VariantSpec:
    """A parameterized share-style representation axiom.

    For a group of size s agreeing in k rounds, the checker derives the
    largest demand level ℓ the group qualifies for and compares it (or a
    scaled-down target) with the group's share-style satisfaction.

    `size_slack` (ε ≥ 0) loosens the size requirement to s ≥ (ℓ−ε)·n/κ.
    `agreement_threshold` picks the divisor κ and the agreement requirement:

    * ``"actual"``: κ = k, no further agreement requirement — strictly
      stronger than the plain proportional axiom for ε > 0;
    * ``"ell"``: κ = the full horizon, and the group must agree in at least
      ℓ rounds;
    * ``"ell-over-alpha"``: κ = the full horizon, and the group must agree
      in at least ℓ/α rounds.

    `satisfaction_target` demands ℓ satisfied rounds (``"ell"``) or only
    floor(α·ℓ) (``"alpha-ell"``).  `alpha` must be in (0, 1].
    """

    size_slack: Fraction = Fraction(0)
    agreement_threshold: str = "actual"
    satisfaction_target: str = "ell"
    alpha: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "size_slack", Fraction(self.size_slack))
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.size_slack < 0:
            raise BadSpec(f"size_slack must be ≥ 0, got {self.size_slack}")
        if not (0 < self.alpha <= 1):
            raise BadSpec(f"alpha must be in (0, 1], got {self.alpha}")
        if self.agreement_threshold not in _THRESHOLDS:
            raise BadSpec(
                f"unknown agreement_threshold {self.agreement_threshold!r}; "
                f"expected one of {_THRESHOLDS}"
            )
        if self.satisfaction_target not in _TARGETS:
            raise BadSpec(
                f"unknown satisfaction_target {self.satisfaction_target!r}; "
                f"expected one of {_TARGETS}"
            )

    def to_dict(self) -> dict:
        return {
            "size_slack": f"{self.size_slack.numerator}/{self.size_slack.denominator}",
            "agreement_threshold": self.agreement_threshold,
            "satisfaction_target": self.satisfaction_target,
            "alpha": f"{self.alpha.numerator}/{self.alpha.denominator}",
        }


def check_variant(
    instance: DecisionInstance,
    decisions: Sequence[int | None],
    spec: VariantSpec,
    *,
    voter_limit: int = DEFAULT_VOTER_LIMIT,
) -> AxiomReport:
    """Check a parameterized share-style axiom.  All level arithmetic is
    exact: with ε = en/ed, the size condition s ≥ (ℓ−ε)·n/κ rearranges to
    ℓ ≤ s·κ/n + ε, whose largest integer solution is
    floor((s·κ·ed + en·n) / (n·ed))."""
    validate(instance)
    validate_decisions(instance, decisions)
    _check_limits(instance, voter_limit)
    n, T = instance.num_voters, instance.num_rounds
    masks = _approval_masks(instance)
    sat_bits = _satisfaction_bits(instance, decisions)
    en, ed = spec.size_slack.numerator, spec.size_slack.denominator
    an, ad = spec.alpha.numerator, spec.alpha.denominator
    groups_checked = 0

    for size in range(1, n + 1):
        # Largest level the size condition allows with κ at its maximum (the
        # full horizon); every mode's level, and hence target, is ≤ this.
        ceiling = (size * T * ed + en * n) // (n * ed)
        if ceiling < 1:
            continue
        for group in combinations(range(n), size):
            groups_checked += 1
            joint = 0
            for i in group:
                joint |= sat_bits[i]
            observed = joint.bit_count()
            if observed >= ceiling:
                continue
            agreement = _agreement_bits(masks, group, T)
            k = agreement.bit_count()
            if k == 0:
                continue
            if spec.agreement_threshold == "actual":
                level = (size * k * ed + en * n) // (n * ed)
            elif spec.agreement_threshold == "ell":
                level = min(k, ceiling)
            else:  # "ell-over-alpha": agreement k ≥ ℓ/α means ℓ ≤ α·k
                level = min((an * k) // ad, ceiling)
            if spec.satisfaction_target == "alpha-ell":
                target = (an * level) // ad
            else:
                target = level
            if target >= 1 and observed < target:
                return AxiomReport(
                    "variant-pjr",
                    False,
                    GroupWitness(group, _bits_to_rounds(agreement), target, observed),
                    {"groups_checked": groups_checked, "spec": spec.to_dict()},
                )
    return AxiomReport(
        "variant-pjr", True, None,
        {"groups_checked": groups_checked, "spec": spec.to_dict()},
    )


# ---------------------------------------------------------------------------
# Closed groups and lower quota
# ---------------------------------------------------------------------------


def find_closed_groups(instance: DecisionInstance) -> list[tuple[int, ...]]:
    """Maximal groups with identical approval behavior and no outside overlap.

    Voters are partitioned by their full approval vector; a class is closed
    when, in every round, its (common) approval set is disjoint from every
    outside voter's approval set.  A class approving nothing in a round is
    trivially disjoint there.  Closed groups are returned ordered by their
    smallest member.
    """
    validate(instance)
    n = instance.num_voters
    vectors: dict[tuple[frozenset[int], ...], list[int]] = {}
    for i in range(n):
        vector = tuple(round_.approvals[i] for round_ in instance.rounds)
        vectors.setdefault(vector, []).append(i)

    closed: list[tuple[int, ...]] = []
    for vector, members in vectors.items():
        member_set = set(members)
        ok = True
        for j, common in enumerate(vector):
            if not common:
                continue
            for outsider, approved in enumerate(instance.rounds[j].approvals):
                if outsider not in member_set and common & approved:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            closed.append(tuple(members))
    closed.sort(key=lambda group: group[0])
    return closed


def check_lower_quota_closed(
    instance: DecisionInstance,
    decisions: Sequence[int | None],
    *,
    perpetual: bool = False,
) -> AxiomReport:
    """Check that every closed-group member meets the group's lower quota.

    A closed group of size s is entitled to floor(k·s / n) satisfied rounds
    per member within the first k rounds — for k equal to the full horizon,
    or for every prefix length when `perpetual` is set.  The witness is the
    first failing (group, prefix, member) with groups ordered by smallest
    member, prefixes ascending, then members ascending.
    """
    validate(instance)
    validate_decisions(instance, decisions)
    n, T = instance.num_voters, instance.num_rounds
    groups = find_closed_groups(instance)
    axiom = "lq-closed-perpetual" if perpetual else "lq-closed"
    detail = {"closed_groups": [list(g) for g in groups]}

    # prefix_utility[i][k] = utility of voter i over the first k rounds
    prefix = [[0] * (T + 1) for _ in range(n)]
    for j, decided in enumerate(decisions):
        for i in range(n):
            gained = (
                1 if decided is not None and decided in instance.rounds[j].approvals[i]
                else 0
            )
            prefix[i][j + 1] = prefix[i][j] + gained

    lengths = range(1, T + 1) if perpetual else (T,)
    for group in groups:
        size = len(group)
        for k in lengths:
            quota = (k * size) // n
            if quota < 1:
                continue
            for member in group:
                if prefix[member][k] < quota:
                    return AxiomReport(
                        axiom,
                        False,
                        QuotaWitness(group, member, k, quota, prefix[member][k]),
                        detail,
                    )
    return AxiomReport(axiom, True, None, detail)


# ---------------------------------------------------------------------------
# Pareto efficiency
# ---------------------------------------------------------------------------


def check_pareto(
    instance: DecisionInstance,
    decisions: Sequence[int | None],
    *,
    node_budget: int | None = None,
) -> AxiomReport:
    """Search for a decision sequence dominating the given one.

    A sequence dominates when every voter's utility is at least as high and
    some voter's is strictly higher.  The search walks sequences in
    lexicographic order of alternative indices, pruning branches in which
    some voter can no longer recover their base utility, so the witness (if
    any) is the lexicographically smallest dominating sequence.  `node_budget`
    defaults to the worst-case node count of the full tree walk (which can
    exceed the leaf count, the product of the round sizes); a smaller
    explicit budget makes the check raise :class:`SearchBudgetExceeded`
    instead of running long.
    """
    validate(instance)
    validate_decisions(instance, decisions)
    n, T = instance.num_voters, instance.num_rounds
    base = utility_vector(instance, decisions)
    approvers = [instance.approver_sets(j) for j in range(T)]

    space = 1
    full_nodes = 0
    for round_ in instance.rounds:
        space *= round_.num_alternatives
        full_nodes += space
    if node_budget is None:
        node_budget = full_nodes

    # approvable[i][j] = rounds ≥ j in which voter i approves something
    approvable = [[0] * (T + 1) for _ in range(n)]
    for i in range(n):
        for j in range(T - 1, -1, -1):
            has_any = bool(instance.rounds[j].approvals[i])
            approvable[i][j] = approvable[i][j + 1] + (1 if has_any else 0)

    util = [0] * n
    seq = [0] * T
    nodes = 0
    found: SequenceWitness | None = None

    def dfs(j: int) -> bool:
        nonlocal nodes, found
        if j == T:
            if all(u >= b for u, b in zip(util, base)) and any(
                u > b for u, b in zip(util, base)
            ):
                found = SequenceWitness(tuple(seq), tuple(util), base)
                return True
            return False
        for i in range(n):
            if util[i] + approvable[i][j] < base[i]:
                return False
        for c, apps in enumerate(approvers[j]):
            nodes += 1
            if nodes > node_budget:
                raise SearchBudgetExceeded(
                    f"dominance search exceeded {node_budget} nodes"
                )
            seq[j] = c
            for i in apps:
                util[i] += 1
            if dfs(j + 1):
                return True
            for i in apps:
                util[i] -= 1
        seq[j] = 0
        return False

    dominated = dfs(0)
    return AxiomReport(
        "pareto",
        not dominated,
        found,
        {"nodes_explored": nodes, "search_space": space},
    )
