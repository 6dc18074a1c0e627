"""Core data model for sequential approval-based collective decisions.

An instance fixes a set of voters and a sequence of decision rounds.  Each
round offers a fresh slate of alternatives and records, per voter, which of
them the voter approves.  A decision sequence picks one alternative index per
round; a voter's utility is the number of rounds whose decision they approve.

Voters and alternatives are 0-indexed everywhere in this package, including
the JSON instance format.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class SeqvoteError(Exception):
    """Base class for all errors raised by this package."""


class InstanceError(SeqvoteError, ValueError):
    """An instance (or a decision sequence for it) is malformed."""


class EmptyInstance(InstanceError):
    """The instance has no rounds or no voters."""


class EmptyRound(InstanceError):
    """A round offers no alternatives."""


class BadIndex(InstanceError):
    """An approval or decision refers to a nonexistent alternative/voter."""


class LengthMismatch(InstanceError):
    """A per-voter or per-round list has the wrong length."""


class BadConfig(SeqvoteError, ValueError):
    """A generator or rule configuration is invalid."""


class SearchBudgetExceeded(SeqvoteError, RuntimeError):
    """An exhaustive search exceeded its configured node budget."""


@dataclass(frozen=True)
class Round:
    """One decision round: an ordered slate of alternatives plus approvals.

    Parameters
    ----------
    alternatives:
        Labels of the offered alternatives, in slate order.  Labels must be
        unique within the round; alternatives are referred to by their index
        in this tuple.
    approvals:
        One frozenset of alternative indices per voter.
    """

    alternatives: tuple[str, ...]
    approvals: tuple[frozenset[int], ...]

    @property
    def num_alternatives(self) -> int:
        return len(self.alternatives)

    def approvers_of(self, alt: int) -> tuple[int, ...]:
        """Voters approving alternative `alt`, ascending."""
        return tuple(i for i, a in enumerate(self.approvals) if alt in a)


@dataclass(frozen=True)
class DecisionInstance:
    """A full instance: `num_voters` voters facing `len(rounds)` rounds."""

    num_voters: int
    rounds: tuple[Round, ...]

    @property
    def num_rounds(self) -> int:
        return len(self.rounds)

    def approver_sets(self, j: int) -> list[tuple[int, ...]]:
        """Per alternative of round `j`, the approving voters (ascending)."""
        round_ = self.rounds[j]
        sets: list[list[int]] = [[] for _ in round_.alternatives]
        for voter, approved in enumerate(round_.approvals):
            for alt in approved:
                sets[alt].append(voter)
        return [tuple(sorted(s)) for s in sets]


def make_instance(
    num_voters: int,
    rounds: Iterable[tuple[Sequence[str], Sequence[Iterable[int]]]],
) -> DecisionInstance:
    """Build and validate an instance from plain sequences.

    `rounds` yields `(alternatives, approvals)` pairs where `approvals` holds
    one iterable of alternative indices per voter.
    """
    built = tuple(
        Round(tuple(alts), tuple(frozenset(a) for a in approvals))
        for alts, approvals in rounds
    )
    instance = DecisionInstance(num_voters, built)
    validate(instance)
    return instance


def validate(instance: DecisionInstance) -> None:
    """Check all structural invariants; raise a typed error naming the first failure.

    Invariants: at least one voter and one round; every round offers at least
    one alternative with unique labels; every round carries exactly one
    approval set per voter; every approved index points at an offered
    alternative.
    """
    if instance.num_voters < 1:
        raise EmptyInstance("an instance needs at least one voter")
    if instance.num_rounds < 1:
        raise EmptyInstance("an instance needs at least one round")
    for j, round_ in enumerate(instance.rounds):
        m = round_.num_alternatives
        if m < 1:
            raise EmptyRound(f"round {j} offers no alternatives")
        if len(set(round_.alternatives)) != m:
            raise BadIndex(f"round {j} has duplicate alternative labels")
        if len(round_.approvals) != instance.num_voters:
            raise LengthMismatch(
                f"round {j} has {len(round_.approvals)} approval sets "
                f"for {instance.num_voters} voters"
            )
        for voter, approved in enumerate(round_.approvals):
            for alt in approved:
                if not (0 <= alt < m):
                    raise BadIndex(
                        f"round {j}: voter {voter} approves alternative {alt}, "
                        f"but the round offers indices 0..{m - 1}"
                    )


def validate_decisions(
    instance: DecisionInstance, decisions: Sequence[int | None]
) -> None:
    """Check that `decisions` picks one offered alternative per round.

    `None` entries (undecided rounds of a partial sequence) are allowed.
    """
    if len(decisions) != instance.num_rounds:
        raise LengthMismatch(
            f"decision sequence has length {len(decisions)} "
            f"for {instance.num_rounds} rounds"
        )
    for j, d in enumerate(decisions):
        if d is None:
            continue
        if not (0 <= d < instance.rounds[j].num_alternatives):
            raise BadIndex(
                f"round {j}: decision {d} is not an offered alternative index"
            )


def utility_vector(
    instance: DecisionInstance, decisions: Sequence[int | None]
) -> tuple[int, ...]:
    """Per-voter utilities: the number of decided rounds each voter approves."""
    validate_decisions(instance, decisions)
    util = [0] * instance.num_voters
    for round_, d in zip(instance.rounds, decisions):
        if d is None:
            continue
        for voter, approved in enumerate(round_.approvals):
            if d in approved:
                util[voter] += 1
    return tuple(util)


def agreement_rounds(
    instance: DecisionInstance, group: Iterable[int]
) -> tuple[int, ...]:
    """Rounds (ascending) in which every group member approves a common alternative."""
    members = sorted(set(group))
    if not members:
        raise InstanceError("the group of voters must be non-empty")
    for i in members:
        if not (0 <= i < instance.num_voters):
            raise BadIndex(f"voter {i} is not in 0..{instance.num_voters - 1}")
    agreed = []
    for j, round_ in enumerate(instance.rounds):
        common = round_.approvals[members[0]]
        for i in members[1:]:
            common = common & round_.approvals[i]
            if not common:
                break
        if common:
            agreed.append(j)
    return tuple(agreed)


def satisfied_round_count(
    instance: DecisionInstance,
    decisions: Sequence[int | None],
    group: Iterable[int],
) -> int:
    """Number of decided rounds whose decision at least one group member approves."""
    members = sorted(set(group))
    if not members:
        raise InstanceError("the group of voters must be non-empty")
    count = 0
    for round_, d in zip(instance.rounds, decisions):
        if d is None:
            continue
        if any(d in round_.approvals[i] for i in members):
            count += 1
    return count
