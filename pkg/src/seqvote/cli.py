"""Command-line interface.

Four subcommands::

    seqvote run INSTANCE --rule NAME [rule options]
    seqvote check INSTANCE DECISIONS --axiom NAME [axiom options]
    seqvote gen (--dist ... | --counterexample ...) --out PATH
    seqvote experiment CONFIG.toml

`run` prints a JSON object with the decision sequence (indices and labels),
per-voter utilities, and the rule's trace.  `check` prints an axiom report
and exits 0 when satisfied, 1 when violated, 2 on errors.  `gen` writes an
instance file and prints a one-line JSON summary.  `experiment` runs a
multi-trial TOML-configured experiment producing a CSV and a summary JSON.
All failures exit with code 2 and a diagnostic naming the error type.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .axioms import (
    AXIOM_BY_NAME,
    VariantSpec,
    check_lower_quota_closed,
    check_pareto,
    check_representation,
    check_variant,
    DEFAULT_VOTER_LIMIT,
)
from .core import SeqvoteError
from .experiment import load_experiment_config, write_experiment
from .gen import (
    CounterexampleConfig,
    DISTRIBUTION_NAMES,
    EuclideanConfig,
    gen_counterexample,
    gen_euclidean,
)
from .io import (
    load_decisions,
    load_instance,
    mean_approval_size,
    run_output,
    save_instance,
)
from .rules import DEFAULT_NODE_BUDGET, RULE_NAMES, run_named_rule

__all__ = ["main", "build_parser"]

_CHECKS = tuple(AXIOM_BY_NAME) + (
    "lq-closed",
    "lq-closed-perpetual",
    "pareto",
    "variant-pjr",
)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as err:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from err


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqvote",
        description="Proportional rules and axiom checks for sequential "
        "approval-based collective decisions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a decision rule on an instance file")
    run.add_argument("instance", help="instance JSON file")
    run.add_argument("--rule", required=True, choices=RULE_NAMES)
    run.add_argument(
        "--completion",
        choices=("phragmen", "epsilon", "utilitarian", "none"),
        default="phragmen",
        help="what the Method of Equal Shares does after premature "
        "termination (default: phragmen)",
    )
    run.add_argument(
        "--node-budget",
        type=int,
        default=DEFAULT_NODE_BUDGET,
        help="node cap for the exact search (default: %(default)s)",
    )
    run.set_defaults(handler=_cmd_run)

    check = sub.add_parser("check", help="check a decision sequence against an axiom")
    check.add_argument("instance", help="instance JSON file")
    check.add_argument(
        "decisions",
        help="decisions JSON file: an array of indices/labels/nulls, or an "
        "object with a 'decisions' key (e.g. the run command's output)",
    )
    check.add_argument("--axiom", required=True, choices=_CHECKS)
    check.add_argument(
        "--epsilon",
        type=_fraction,
        default=Fraction(0),
        help="size slack for variant-pjr (default: 0)",
    )
    check.add_argument(
        "--alpha",
        type=_fraction,
        default=Fraction(1),
        help="scaling factor in (0,1] for variant-pjr (default: 1)",
    )
    check.add_argument(
        "--agreement",
        choices=("actual", "ell", "ell-over-alpha"),
        default="actual",
        help="variant-pjr agreement threshold (default: actual)",
    )
    check.add_argument(
        "--target",
        choices=("ell", "alpha-ell"),
        default="ell",
        help="variant-pjr satisfaction target (default: ell)",
    )
    check.add_argument(
        "--voter-limit",
        type=int,
        default=DEFAULT_VOTER_LIMIT,
        help="group-enumeration guard (default: %(default)s)",
    )
    check.add_argument(
        "--node-budget",
        type=int,
        default=None,
        help="node cap for the dominance search (default: the full space)",
    )
    check.set_defaults(handler=_cmd_check)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument("--out", required=True, help="output instance path")
    gen.add_argument("--dist", choices=DISTRIBUTION_NAMES, help="spatial distribution")
    gen.add_argument("--n", type=int, help="number of voters")
    gen.add_argument("--T", type=int, help="number of rounds")
    gen.add_argument("--m", type=int, help="alternatives per round")
    gen.add_argument("--f", type=float, default=1.0, help="approval factor ≥ 1")
    gen.add_argument("--sigma", type=float, help="standard deviation override")
    gen.add_argument("--seed", type=int, default=0, help="64-bit seed")
    gen.add_argument(
        "--counterexample",
        action="store_true",
        help="build the hard instance on which no sequence satisfies the "
        "epsilon-slack proportionality variant",
    )
    gen.add_argument("--epsilon", type=_fraction, help="slack in (0,1)")
    gen.add_argument("--k", type=int, help="number of shared-slate rounds")
    gen.add_argument(
        "--guard",
        type=int,
        default=1_000_000,
        help="cap on alternatives per round (default: %(default)s)",
    )
    gen.set_defaults(handler=_cmd_gen)

    experiment = sub.add_parser(
        "experiment", help="run a multi-trial experiment from a TOML config"
    )
    experiment.add_argument("config", help="experiment TOML file")
    experiment.set_defaults(handler=_cmd_experiment)

    return parser


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _cmd_run(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    decisions, trace = run_named_rule(
        args.rule,
        instance,
        completion=args.completion,
        node_budget=args.node_budget,
    )
    _print_json(run_output(instance, decisions, trace))
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    decisions = load_decisions(args.decisions, instance)
    axiom = args.axiom
    if axiom in AXIOM_BY_NAME:
        report = check_representation(
            instance, decisions, AXIOM_BY_NAME[axiom], voter_limit=args.voter_limit
        )
    elif axiom in ("lq-closed", "lq-closed-perpetual"):
        report = check_lower_quota_closed(
            instance, decisions, perpetual=axiom.endswith("perpetual")
        )
    elif axiom == "pareto":
        report = check_pareto(instance, decisions, node_budget=args.node_budget)
    else:  # variant-pjr
        spec = VariantSpec(
            size_slack=args.epsilon,
            agreement_threshold=args.agreement,
            satisfaction_target=args.target,
            alpha=args.alpha,
        )
        report = check_variant(instance, decisions, spec, voter_limit=args.voter_limit)
    _print_json(report.to_dict())
    return 0 if report.satisfied else 1


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.counterexample:
        for flag, value in (("--epsilon", args.epsilon), ("--k", args.k), ("--T", args.T)):
            if value is None:
                raise SeqvoteError(f"--counterexample requires {flag}")
        config = CounterexampleConfig(
            epsilon=args.epsilon,
            agreement_rounds=args.k,
            horizon=args.T,
            num_voters=args.n,
            guard=args.guard,
        )
        instance = gen_counterexample(config)
        summary = {
            "kind": "counterexample",
            "voters": instance.num_voters,
            "rounds": instance.num_rounds,
            "group_size": config.group_size,
            "alternatives_first_round": instance.rounds[0].num_alternatives,
            "mean_approval_size": mean_approval_size(instance),
            "path": args.out,
        }
    else:
        for flag, value in (
            ("--dist", args.dist),
            ("--n", args.n),
            ("--T", args.T),
            ("--m", args.m),
        ):
            if value is None:
                raise SeqvoteError(f"gen requires {flag} (or use --counterexample)")
        config = EuclideanConfig(
            distribution=args.dist,
            num_voters=args.n,
            num_rounds=args.T,
            alternatives_per_round=args.m,
            approval_factor=args.f,
            sigma=args.sigma,
            seed=args.seed,
        )
        instance = gen_euclidean(config)
        summary = {
            "kind": "euclidean",
            "distribution": args.dist,
            "voters": instance.num_voters,
            "rounds": instance.num_rounds,
            "alternatives": args.m,
            "factor": args.f,
            "sigma": config.effective_sigma,
            "seed": args.seed,
            "mean_approval_size": mean_approval_size(instance),
            "path": args.out,
        }
    save_instance(args.out, instance)
    _print_json(summary)
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    config = load_experiment_config(args.config)
    csv_path, summary_path = write_experiment(config)
    _print_json(
        {
            "trials": config.trials,
            "rules": [rule.label for rule in config.rules],
            "csv": str(csv_path),
            "summary": str(summary_path),
        }
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    try:
        return args.handler(args)
    except SeqvoteError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
