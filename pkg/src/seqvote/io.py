"""Reading and writing instances, decision sequences, and reports.

The instance file format is JSON::

    {
      "voters": 3,
      "rounds": [
        {"alternatives": ["a", "b"], "approvals": [[0], [0, 1], []]}
      ]
    }

with one approval array (0-based alternative indices) per voter in every
round.  Serialization is deterministic: keys sorted, approvals sorted
ascending, two-space indentation, trailing newline — rerunning a generator
with the same seed reproduces files byte for byte.

A decisions file is either a JSON array or an object with a ``"decisions"``
key (so the run command's output can be fed back in).  Entries may be
0-based indices, alternative labels (resolved per round), or null for an
undecided round.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from .core import DecisionInstance, SeqvoteError, make_instance, utility_vector

__all__ = [
    "FormatError",
    "instance_to_dict",
    "instance_from_dict",
    "load_instance",
    "save_instance",
    "decisions_from_data",
    "load_decisions",
    "run_output",
    "mean_approval_size",
]


class FormatError(SeqvoteError, ValueError):
    """A document does not match the expected shape."""


def instance_to_dict(instance: DecisionInstance) -> dict:
    return {
        "voters": instance.num_voters,
        "rounds": [
            {
                "alternatives": list(round_.alternatives),
                "approvals": [sorted(a) for a in round_.approvals],
            }
            for round_ in instance.rounds
        ],
    }


def _expect(data: dict, key: str, kind: type, where: str):
    if not isinstance(data, dict):
        raise FormatError(f"{where} must be an object, got {type(data).__name__}")
    if key not in data:
        raise FormatError(f"{where} is missing the {key!r} key")
    value = data[key]
    if kind is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise FormatError(f"{where}[{key!r}] must be an integer")
    elif not isinstance(value, kind):
        raise FormatError(f"{where}[{key!r}] must be a {kind.__name__}")
    return value


def instance_from_dict(data: dict) -> DecisionInstance:
    """Build and validate an instance from a parsed JSON document."""
    voters = _expect(data, "voters", int, "instance")
    rounds_data = _expect(data, "rounds", list, "instance")
    rounds = []
    for j, round_data in enumerate(rounds_data):
        where = f"rounds[{j}]"
        alternatives = _expect(round_data, "alternatives", list, where)
        approvals = _expect(round_data, "approvals", list, where)
        if not all(isinstance(label, str) for label in alternatives):
            raise FormatError(f"{where} alternatives must be strings")
        for i, approved in enumerate(approvals):
            if not isinstance(approved, list) or not all(
                isinstance(c, int) and not isinstance(c, bool) for c in approved
            ):
                raise FormatError(
                    f"{where} approvals[{i}] must be an array of integers"
                )
        rounds.append((alternatives, approvals))
    return make_instance(voters, rounds)


def load_instance(path: str | Path) -> DecisionInstance:
    with open(path, encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as err:
            raise FormatError(f"{path} is not valid JSON: {err}") from err
    return instance_from_dict(data)


def save_instance(path: str | Path, instance: DecisionInstance) -> None:
    text = json.dumps(instance_to_dict(instance), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def decisions_from_data(
    data, instance: DecisionInstance
) -> list[int | None]:
    """Interpret a decisions document against an instance.

    Accepts a JSON array or an object with a ``"decisions"`` array; entries
    are indices, labels, or null.
    """
    if isinstance(data, dict):
        data = _expect(data, "decisions", list, "decisions")
    if not isinstance(data, list):
        raise FormatError("decisions must be an array or an object with one")
    if len(data) != instance.num_rounds:
        raise FormatError(
            f"decisions cover {len(data)} rounds, "
            f"instance has {instance.num_rounds}"
        )
    decisions: list[int | None] = []
    for j, entry in enumerate(data):
        if entry is None:
            decisions.append(None)
        elif isinstance(entry, bool):
            raise FormatError(f"decisions[{j}] must be an index, label, or null")
        elif isinstance(entry, int):
            decisions.append(entry)
        elif isinstance(entry, str):
            labels = instance.rounds[j].alternatives
            if entry not in labels:
                raise FormatError(
                    f"decisions[{j}]: no alternative labeled {entry!r} "
                    f"in round {j}"
                )
            decisions.append(labels.index(entry))
        else:
            raise FormatError(f"decisions[{j}] must be an index, label, or null")
    return decisions


def load_decisions(path: str | Path, instance: DecisionInstance) -> list[int | None]:
    with open(path, encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as err:
            raise FormatError(f"{path} is not valid JSON: {err}") from err
    return decisions_from_data(data, instance)


def run_output(
    instance: DecisionInstance,
    decisions: Sequence[int | None],
    trace,
) -> dict:
    """The run command's JSON payload."""
    labels = [
        None if d is None else instance.rounds[j].alternatives[d]
        for j, d in enumerate(decisions)
    ]
    return {
        "decisions": list(decisions),
        "labels": labels,
        "utilities": list(utility_vector(instance, decisions)),
        "trace": trace.to_dict(),
    }


def mean_approval_size(instance: DecisionInstance) -> float:
    """Average approval-set size over all voters and rounds."""
    total = sum(
        len(approved)
        for round_ in instance.rounds
        for approved in round_.approvals
    )
    return total / (instance.num_voters * instance.num_rounds)
