"""Multi-trial experiments: generate instances, run rules, tabulate metrics.

The experiment is declared in a TOML document::

    trials = 200
    seed = 42
    output = "results.csv"            # paths resolve relative to the config file
    # summary = "results.summary.json"  (default: output with .summary.json)
    # parallelism = 4                   (default: 1, inline)

    [generator]
    kind = "euclidean"                # or "random"
    distribution = "restricted"
    voters = 20
    rounds = 50
    alternatives = 20
    factor = 1.5
    # sigma = 0.2

    [[rules]]
    name = "av"
    [[rules]]
    name = "mes"
    completion = "phragmen"
    # label = "mes/phragmen"          (CSV label; defaults to the name)

Each trial derives its own 64-bit seed from the master seed and the trial
index, generates one instance, and runs every configured rule on that same
instance.  The CSV has the header ``rule,trial,avg_utility,p25_utility,gini``
with rows grouped by configured rule order, then trial ascending.  The
companion summary JSON reports per-rule median, 25th/75th percentile
(nearest-rank), and mean of each metric.  Identical configs produce
identical bytes, regardless of parallelism.
"""

from __future__ import annotations

import csv
import io as _io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import BadConfig, SeqvoteError
from .gen import EuclideanConfig, gen_euclidean, gen_random
from .metrics import (
    average_utility,
    gini_coefficient,
    nearest_rank,
    percentile_utility,
)
from .core import utility_vector
from .rules import DEFAULT_NODE_BUDGET, RULE_NAMES, run_named_rule

__all__ = [
    "TrialFailure",
    "RuleSpec",
    "ExperimentConfig",
    "parse_experiment_config",
    "load_experiment_config",
    "trial_seed",
    "run_experiment",
    "write_experiment",
    "CSV_HEADER",
]

CSV_HEADER = ("rule", "trial", "avg_utility", "p25_utility", "gini")

_METRICS = ("avg_utility", "p25_utility", "gini")


class TrialFailure(SeqvoteError, RuntimeError):
    """One (rule, trial) computation failed; carries enough to reproduce."""

    def __init__(self, rule: str, trial: int, seed: int, cause: str):
        super().__init__(
            f"rule {rule!r} failed on trial {trial} (seed {seed}): {cause}"
        )
        self.rule = rule
        self.trial = trial
        self.seed = seed
        self.cause = cause

    def __reduce__(self):  # crosses process boundaries intact
        return (TrialFailure, (self.rule, self.trial, self.seed, self.cause))


@dataclass(frozen=True)
class RuleSpec:
    """One rule to run, with its options and CSV label."""

    name: str
    completion: str = "phragmen"
    node_budget: int = DEFAULT_NODE_BUDGET
    label: str = ""

    def __post_init__(self) -> None:
        if self.name not in RULE_NAMES:
            raise BadConfig(
                f"unknown rule {self.name!r}; expected one of {RULE_NAMES}"
            )
        if not self.label:
            object.__setattr__(self, "label", self.name)


@dataclass(frozen=True)
class ExperimentConfig:
    generator: dict
    rules: tuple[RuleSpec, ...]
    trials: int
    seed: int
    output: Path
    summary: Path
    parallelism: int = 1


def _as_int(data: dict, key: str, where: str, default=None) -> int:
    if key not in data:
        if default is None:
            raise BadConfig(f"{where} is missing {key!r}")
        return default
    value = data[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise BadConfig(f"{where}[{key!r}] must be an integer")
    return value


def parse_experiment_config(data: dict, base_dir: str | Path = ".") -> ExperimentConfig:
    base = Path(base_dir)
    if not isinstance(data, dict):
        raise BadConfig("the experiment config must be a table")
    trials = _as_int(data, "trials", "config")
    if trials < 0:
        raise BadConfig(f"trials must be ≥ 0, got {trials}")
    seed = _as_int(data, "seed", "config")
    if not (0 <= seed < 2**64):
        raise BadConfig("seed must be a 64-bit non-negative integer")
    output = data.get("output")
    if not isinstance(output, str) or not output:
        raise BadConfig("config needs an 'output' CSV path")
    output_path = base / output
    summary = data.get("summary")
    if summary is None:
        summary_path = output_path.with_suffix(".summary.json")
    elif isinstance(summary, str) and summary:
        summary_path = base / summary
    else:
        raise BadConfig("'summary' must be a non-empty path string")
    parallelism = _as_int(data, "parallelism", "config", default=1)
    if parallelism < 1:
        raise BadConfig(f"parallelism must be ≥ 1, got {parallelism}")

    generator = data.get("generator")
    if not isinstance(generator, dict):
        raise BadConfig("config needs a [generator] table")
    kind = generator.get("kind")
    if kind not in ("euclidean", "random"):
        raise BadConfig(f"generator kind must be 'euclidean' or 'random', got {kind!r}")
    # Validate generator parameters eagerly by building a probe config.
    _instance_for_trial(dict(generator), 0, seed, probe=True)

    rules_data = data.get("rules")
    if not isinstance(rules_data, list) or not rules_data:
        raise BadConfig("config needs a non-empty [[rules]] list")
    rules = []
    for idx, rule_data in enumerate(rules_data):
        if not isinstance(rule_data, dict) or "name" not in rule_data:
            raise BadConfig(f"rules[{idx}] needs a 'name'")
        allowed = {"name", "completion", "node_budget", "label"}
        unknown = set(rule_data) - allowed
        if unknown:
            raise BadConfig(f"rules[{idx}] has unknown keys {sorted(unknown)}")
        rules.append(RuleSpec(**rule_data))
    labels = [r.label for r in rules]
    if len(set(labels)) != len(labels):
        raise BadConfig("rule labels must be unique; set 'label' to disambiguate")

    return ExperimentConfig(
        generator=dict(generator),
        rules=tuple(rules),
        trials=trials,
        seed=seed,
        output=output_path,
        summary=summary_path,
        parallelism=parallelism,
    )


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    try:
        import tomllib  # Python ≥ 3.11
    except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
        import tomli as tomllib
    path = Path(path)
    with open(path, "rb") as handle:
        try:
            data = tomllib.load(handle)
        except tomllib.TOMLDecodeError as err:
            raise BadConfig(f"{path} is not valid TOML: {err}") from err
    return parse_experiment_config(data, base_dir=path.parent)


def trial_seed(master_seed: int, trial: int) -> int:
    """64-bit per-trial seed derived from the master seed."""
    sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial,))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def _instance_for_trial(generator: dict, trial: int, master_seed: int, probe: bool = False):
    seed = trial_seed(master_seed, trial)
    kind = generator.get("kind")
    params = {k: v for k, v in generator.items() if k != "kind"}
    if kind == "euclidean":
        allowed = {"distribution", "voters", "rounds", "alternatives", "factor", "sigma"}
        unknown = set(params) - allowed
        if unknown:
            raise BadConfig(f"[generator] has unknown keys {sorted(unknown)}")
        config = EuclideanConfig(
            distribution=params.get("distribution", ""),
            num_voters=_as_int(params, "voters", "[generator]"),
            num_rounds=_as_int(params, "rounds", "[generator]"),
            alternatives_per_round=_as_int(params, "alternatives", "[generator]"),
            approval_factor=float(params.get("factor", 1.0)),
            sigma=float(params["sigma"]) if "sigma" in params else None,
            seed=seed,
        )
        if probe:
            return None
        return gen_euclidean(config)
    if kind == "random":
        allowed = {"voters", "rounds", "alternatives", "p_approve"}
        unknown = set(params) - allowed
        if unknown:
            raise BadConfig(f"[generator] has unknown keys {sorted(unknown)}")
        voters = _as_int(params, "voters", "[generator]")
        rounds = _as_int(params, "rounds", "[generator]")
        alternatives = _as_int(params, "alternatives", "[generator]")
        if min(voters, rounds, alternatives) < 1:
            raise BadConfig("voters, rounds and alternatives must all be ≥ 1")
        p_approve = float(params.get("p_approve", 0.5))
        if not (0 < p_approve <= 1):
            raise BadConfig(f"p_approve must be in (0, 1], got {p_approve}")
        if probe:
            return None
        return gen_random(voters, rounds, alternatives, p_approve, seed)
    raise BadConfig(f"generator kind must be 'euclidean' or 'random', got {kind!r}")


def _compute_trial(
    generator: dict, rules: tuple[RuleSpec, ...], trial: int, master_seed: int
) -> list[tuple[float, float, float]]:
    """Metrics for one trial: one (avg, p25, gini) triple per rule."""
    seed = trial_seed(master_seed, trial)
    try:
        instance = _instance_for_trial(generator, trial, master_seed)
    except Exception as err:  # noqa: BLE001 - reported with trial context
        raise TrialFailure("<generator>", trial, seed, f"{type(err).__name__}: {err}")
    results = []
    for rule in rules:
        try:
            decisions, _ = run_named_rule(
                rule.name,
                instance,
                completion=rule.completion,
                node_budget=rule.node_budget,
            )
            utilities = utility_vector(instance, decisions)
            T = instance.num_rounds
            results.append(
                (
                    average_utility(utilities, T),
                    percentile_utility(utilities, T),
                    gini_coefficient(utilities, T),
                )
            )
        except TrialFailure:
            raise
        except Exception as err:  # noqa: BLE001 - reported with trial context
            raise TrialFailure(
                rule.label, trial, seed, f"{type(err).__name__}: {err}"
            )
    return results


def run_experiment(config: ExperimentConfig) -> tuple[str, dict]:
    """Run all trials; return (CSV text, summary dict).  Pure and
    deterministic given the config."""
    per_trial: list[list[tuple[float, float, float]]]
    trials = range(config.trials)
    if config.parallelism > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=config.parallelism) as pool:
            per_trial = list(
                pool.map(
                    _compute_trial,
                    (config.generator for _ in trials),
                    (config.rules for _ in trials),
                    trials,
                    (config.seed for _ in trials),
                )
            )
    else:
        per_trial = [
            _compute_trial(config.generator, config.rules, t, config.seed)
            for t in trials
        ]

    buffer = _io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r, rule in enumerate(config.rules):
        for t in range(config.trials):
            avg, p25, gini = per_trial[t][r]
            writer.writerow([rule.label, t, str(avg), str(p25), str(gini)])

    summary_rules: dict[str, dict] = {}
    for r, rule in enumerate(config.rules):
        per_metric: dict[str, dict] = {}
        for m, metric in enumerate(_METRICS):
            values = sorted(per_trial[t][r][m] for t in range(config.trials))
            if values:
                per_metric[metric] = {
                    "median": statistics.median(values),
                    "p25": nearest_rank(values, 0.25),
                    "p75": nearest_rank(values, 0.75),
                    "mean": statistics.fmean(values),
                }
        if per_metric:
            summary_rules[rule.label] = per_metric
    summary = {"trials": config.trials, "rules": summary_rules}
    return buffer.getvalue(), summary


def write_experiment(config: ExperimentConfig) -> tuple[Path, Path]:
    """Run the experiment and write the CSV and summary files."""
    csv_text, summary = run_experiment(config)
    config.output.parent.mkdir(parents=True, exist_ok=True)
    config.output.write_text(csv_text, encoding="utf-8")
    config.summary.parent.mkdir(parents=True, exist_ok=True)
    config.summary.write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return config.output, config.summary
