"""End-to-end command-line tests driving main(argv)."""

from __future__ import annotations

import json

import pytest

from seqvote import make_instance, save_instance, load_instance
from seqvote.cli import main


def write_instance(tmp_path, instance, name="instance.json"):
    path = tmp_path / name
    save_instance(path, instance)
    return str(path)


def write_decisions(tmp_path, decisions, name="decisions.json"):
    path = tmp_path / name
    path.write_text(json.dumps(decisions) + "\n")
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def alternation_path(tmp_path, alternation_instance):
    return write_instance(tmp_path, alternation_instance, "alternation.json")


@pytest.fixture
def premature_path(tmp_path, premature_stop_instance):
    return write_instance(tmp_path, premature_stop_instance, "premature.json")


class TestRunCommand:
    def test_load_balancing_alternates(self, capsys, alternation_path):
        code, out, err = run_cli(
            capsys, "run", alternation_path, "--rule", "phragmen"
        )
        assert code == 0 and err == ""
        payload = json.loads(out)
        assert payload["decisions"] == [0, 1] * 5
        assert payload["labels"] == ["a", "b"] * 5
        assert payload["utilities"] == [10, 10, 10, 5, 5, 5, 5, 5, 5, 5]
        assert payload["trace"]["rule"] == "phragmen"

    def test_equal_shares_marks_premature_stop(self, capsys, premature_path):
        code, out, _ = run_cli(capsys, "run", premature_path, "--rule", "mes")
        assert code == 0
        payload = json.loads(out)
        assert payload["decisions"] == [1, 1, 1, 0, 0, 0]
        assert payload["labels"] == ["b"] * 6
        assert payload["trace"]["premature_round"] == 4

    def test_completion_flag(self, capsys, premature_path):
        code, out, _ = run_cli(
            capsys, "run", premature_path, "--rule", "mes", "--completion", "none"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["decisions"] == [1, 1, 1, 0, None, None]
        assert payload["labels"][-1] is None

    def test_node_budget_flag_reaches_the_search(self, capsys, premature_path):
        code, out, err = run_cli(
            capsys, "run", premature_path, "--rule", "pav", "--node-budget", "2"
        )
        assert code == 2 and out == ""
        assert err.startswith("error: SearchBudgetExceeded:")

    def test_empty_instance_file(self, capsys, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text('{"voters": 2, "rounds": []}')
        code, out, err = run_cli(capsys, "run", str(path), "--rule", "av")
        assert code == 2
        assert err.startswith("error: EmptyInstance:")

    def test_invalid_json_file(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{")
        code, _, err = run_cli(capsys, "run", str(path), "--rule", "av")
        assert code == 2
        assert err.startswith("error: FormatError:")

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "run", str(tmp_path / "nope.json"), "--rule", "av"
        )
        assert code == 2
        assert err.startswith("error:")

    def test_unknown_rule_is_a_usage_error(self, capsys, alternation_path):
        code, _, err = run_cli(
            capsys, "run", alternation_path, "--rule", "borda"
        )
        assert code == 2
        assert "invalid choice" in err

    def test_output_is_sorted_and_indented(self, capsys, premature_path):
        _, out, _ = run_cli(capsys, "run", premature_path, "--rule", "av")
        payload = json.loads(out)
        assert out == json.dumps(payload, indent=2, sort_keys=True) + "\n"


class TestCheckCommand:
    def test_satisfied_exits_zero(self, capsys, tmp_path, ejr_contrast_instance):
        instance = write_instance(tmp_path, ejr_contrast_instance)
        decisions = write_decisions(tmp_path, [3, 3, 3, 3, 0, 0, 0, 0])
        code, out, _ = run_cli(
            capsys, "check", instance, decisions, "--axiom", "ejr"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["satisfied"] is True
        assert payload["axiom"] == "ejr"
        assert payload["witness"] is None

    def test_violated_exits_one_with_witness(
        self, capsys, tmp_path, ejr_contrast_instance
    ):
        instance = write_instance(tmp_path, ejr_contrast_instance)
        decisions = write_decisions(tmp_path, [1, 1, 2, 2, 3, 3, 3, 4])
        code, out, _ = run_cli(
            capsys, "check", instance, decisions, "--axiom", "ejr"
        )
        assert code == 1
        payload = json.loads(out)
        assert payload["satisfied"] is False
        assert payload["witness"]["group"] == [0, 1]
        assert payload["witness"]["demand"] == 4
        assert payload["witness"]["observed"] == 2

    def test_rule_output_feeds_check(self, capsys, tmp_path, alternation_path):
        code, out, _ = run_cli(
            capsys, "run", alternation_path, "--rule", "phragmen"
        )
        assert code == 0
        decisions_path = tmp_path / "played.json"
        decisions_path.write_text(out)
        code, out, _ = run_cli(
            capsys,
            "check",
            alternation_path,
            str(decisions_path),
            "--axiom",
            "weak-ejr",
        )
        assert code == 1
        payload = json.loads(out)
        assert payload["witness"]["group"] == [3, 4, 5, 6, 7, 8]

    def test_labels_in_decisions_file(self, capsys, tmp_path, premature_path):
        decisions = write_decisions(tmp_path, ["b"] * 6)
        code, out, _ = run_cli(
            capsys, "check", premature_path, decisions, "--axiom", "weak-pjr"
        )
        assert code == 0

    def test_variant_flags(self, capsys, tmp_path, premature_path):
        decisions = write_decisions(tmp_path, [1, 1, 1, 0, 0, 0])
        code, out, _ = run_cli(
            capsys,
            "check",
            premature_path,
            decisions,
            "--axiom",
            "variant-pjr",
            "--epsilon",
            "0",
            "--agreement",
            "actual",
            "--target",
            "ell",
        )
        assert code == 1
        payload = json.loads(out)
        assert payload["axiom"] == "variant-pjr"
        assert payload["witness"]["group"] == [0]

    def test_variant_epsilon_relaxes(self, capsys, tmp_path, premature_path):
        decisions = write_decisions(tmp_path, [1, 1, 1, 0, 0, 0])
        code, out, _ = run_cli(
            capsys,
            "check",
            premature_path,
            decisions,
            "--axiom",
            "variant-pjr",
            "--epsilon",
            "1/3",
        )
        assert code in (0, 1)
        payload = json.loads(out)
        assert payload["detail"]["spec"]["size_slack"] == "1/3"

    def test_bad_epsilon_text(self, capsys, tmp_path, premature_path):
        decisions = write_decisions(tmp_path, [1, 1, 1, 0, 0, 0])
        code, _, err = run_cli(
            capsys,
            "check",
            premature_path,
            decisions,
            "--axiom",
            "variant-pjr",
            "--epsilon",
            "much",
        )
        assert code == 2
        assert "not a rational number" in err

    def test_bad_alpha_value(self, capsys, tmp_path, premature_path):
        decisions = write_decisions(tmp_path, [1, 1, 1, 0, 0, 0])
        code, _, err = run_cli(
            capsys,
            "check",
            premature_path,
            decisions,
            "--axiom",
            "variant-pjr",
            "--alpha",
            "2",
        )
        assert code == 2
        assert err.startswith("error: BadSpec:")

    def test_voter_limit_guard(self, capsys, tmp_path):
        instance = make_instance(21, [(["a"], [[0]] * 21)])
        path = write_instance(tmp_path, instance)
        decisions = write_decisions(tmp_path, [0])
        code, _, err = run_cli(
            capsys, "check", path, decisions, "--axiom", "pjr"
        )
        assert code == 2
        assert err.startswith("error: TooManyVoters:")
        code, out, _ = run_cli(
            capsys,
            "check",
            path,
            decisions,
            "--axiom",
            "pjr",
            "--voter-limit",
            "21",
        )
        assert code == 0

    def test_quota_axioms(self, capsys, tmp_path, premature_path):
        decisions = write_decisions(tmp_path, [1, 1, 1, 0, 0, 0])
        code, out, _ = run_cli(
            capsys, "check", premature_path, decisions, "--axiom", "lq-closed"
        )
        assert code == 1
        payload = json.loads(out)
        assert payload["witness"]["group"] == [0]
        assert payload["detail"]["closed_groups"] == [[0], [1, 2]]

    def test_dominance_check(self, capsys, tmp_path, pareto_trap_instance):
        instance = write_instance(tmp_path, pareto_trap_instance)
        wasteful = write_decisions(tmp_path, [1, 1, 0, 0, 0, 1, 2], "w.json")
        code, out, _ = run_cli(
            capsys, "check", instance, wasteful, "--axiom", "pareto"
        )
        assert code == 1
        assert json.loads(out)["witness"]["decisions"] == [0] * 7
        efficient = write_decisions(tmp_path, [0] * 7, "e.json")
        code, _, _ = run_cli(
            capsys, "check", instance, efficient, "--axiom", "pareto"
        )
        assert code == 0

    def test_dominance_node_budget(self, capsys, tmp_path, pareto_trap_instance):
        instance = write_instance(tmp_path, pareto_trap_instance)
        decisions = write_decisions(tmp_path, [1, 1, 0, 0, 0, 1, 2])
        code, _, err = run_cli(
            capsys,
            "check",
            instance,
            decisions,
            "--axiom",
            "pareto",
            "--node-budget",
            "5",
        )
        assert code == 2
        assert err.startswith("error: SearchBudgetExceeded:")

    def test_unknown_axiom_is_a_usage_error(self, capsys, tmp_path, premature_path):
        decisions = write_decisions(tmp_path, [1, 1, 1, 0, 0, 0])
        code, _, err = run_cli(
            capsys, "check", premature_path, decisions, "--axiom", "core"
        )
        assert code == 2
        assert "invalid choice" in err

    def test_length_mismatch(self, capsys, tmp_path, premature_path):
        decisions = write_decisions(tmp_path, [1, 1])
        code, _, err = run_cli(
            capsys, "check", premature_path, decisions, "--axiom", "pjr"
        )
        assert code == 2
        assert err.startswith("error: FormatError:")


class TestGenCommand:
    def test_spatial_generation_round_trips(self, capsys, tmp_path):
        out_path = tmp_path / "inst.json"
        argv = (
            "gen", "--dist", "restricted", "--n", "8", "--T", "5", "--m", "4",
            "--f", "1.5", "--seed", "7", "--out", str(out_path),
        )
        code, out, _ = run_cli(capsys, *argv)
        assert code == 0
        first_bytes = out_path.read_bytes()
        summary = json.loads(out)
        assert summary["kind"] == "euclidean"
        assert summary["voters"] == 8
        assert summary["rounds"] == 5
        assert summary["sigma"] == 0.2
        assert summary["mean_approval_size"] > 0
        instance = load_instance(out_path)
        assert instance.num_voters == 8

        code, _, _ = run_cli(capsys, *argv)
        assert code == 0
        assert out_path.read_bytes() == first_bytes

    def test_unbalanced_reports_its_sigma(self, capsys, tmp_path):
        code, out, _ = run_cli(
            capsys,
            "gen", "--dist", "unbalanced", "--n", "5", "--T", "2", "--m", "3",
            "--out", str(tmp_path / "u.json"),
        )
        assert code == 0
        assert json.loads(out)["sigma"] == 0.1

    def test_sigma_override_flows_through(self, capsys, tmp_path):
        code, out, _ = run_cli(
            capsys,
            "gen", "--dist", "unbalanced", "--n", "5", "--T", "2", "--m", "3",
            "--sigma", "0.3", "--out", str(tmp_path / "u.json"),
        )
        assert code == 0
        assert json.loads(out)["sigma"] == 0.3

    def test_counterexample_generation(self, capsys, tmp_path):
        out_path = tmp_path / "hard.json"
        code, out, _ = run_cli(
            capsys,
            "gen", "--counterexample", "--epsilon", "1/2", "--k", "2",
            "--T", "3", "--out", str(out_path),
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["kind"] == "counterexample"
        assert summary["voters"] == 16
        assert summary["group_size"] == 4
        assert summary["alternatives_first_round"] == 1820
        instance = load_instance(out_path)
        assert instance.rounds[0].num_alternatives == 1820

    def test_counterexample_requires_its_flags(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys,
            "gen", "--counterexample", "--epsilon", "1/2",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 2
        assert "--k" in err

    def test_counterexample_guard(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys,
            "gen", "--counterexample", "--epsilon", "1/2", "--k", "2",
            "--T", "3", "--guard", "100", "--out", str(tmp_path / "x.json"),
        )
        assert code == 2
        assert err.startswith("error: GuardExceeded:")

    def test_spatial_requires_its_flags(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "gen", "--dist", "restricted", "--out", str(tmp_path / "x.json")
        )
        assert code == 2
        assert "--n" in err

    def test_bad_distribution_is_a_usage_error(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys,
            "gen", "--dist", "grid", "--n", "5", "--T", "2", "--m", "3",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 2
        assert "invalid choice" in err


class TestExperimentCommand:
    TOML = """
trials = 2
seed = 5
output = "results.csv"

[generator]
kind = "random"
voters = 4
rounds = 3
alternatives = 2
p_approve = 0.6

[[rules]]
name = "av"

[[rules]]
name = "phragmen"
"""

    def test_end_to_end(self, capsys, tmp_path):
        config = tmp_path / "exp.toml"
        config.write_text(self.TOML)
        code, out, err = run_cli(capsys, "experiment", str(config))
        assert code == 0 and err == ""
        payload = json.loads(out)
        assert payload["trials"] == 2
        assert payload["rules"] == ["av", "phragmen"]
        csv_text = (tmp_path / "results.csv").read_text()
        assert csv_text.startswith("rule,trial,avg_utility,p25_utility,gini\n")
        assert len(csv_text.strip().splitlines()) == 1 + 4
        summary = json.loads((tmp_path / "results.summary.json").read_text())
        assert set(summary["rules"]) == {"av", "phragmen"}

    def test_missing_config(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "experiment", str(tmp_path / "nope.toml")
        )
        assert code == 2
        assert err.startswith("error:")

    def test_bad_rule_in_config(self, capsys, tmp_path):
        config = tmp_path / "exp.toml"
        config.write_text(self.TOML.replace('name = "av"', 'name = "borda"'))
        code, _, err = run_cli(capsys, "experiment", str(config))
        assert code == 2
        assert err.startswith("error: BadConfig:")

    def test_trial_failure_names_the_culprit(self, capsys, tmp_path):
        config = tmp_path / "exp.toml"
        config.write_text(
            self.TOML.replace(
                'name = "phragmen"', 'name = "pav"\nnode_budget = 1'
            )
        )
        code, _, err = run_cli(capsys, "experiment", str(config))
        assert code == 2
        assert err.startswith("error: TrialFailure:")
        assert "trial 0" in err


class TestUsage:
    def test_no_arguments(self, capsys):
        code, _, err = run_cli(capsys)
        assert code == 2

    def test_help_exits_zero(self, capsys):
        code, out, _ = run_cli(capsys, "--help")
        assert code == 0
        assert "run" in out and "check" in out
