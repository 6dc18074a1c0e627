"""Proportional rules for sequential approval-based collective decisions.

A group of voters repeatedly faces a round of alternatives; each voter
approves some of them; a rule picks one per round.  This package provides
online, semi-online, and offline decision rules with proportionality
guarantees, checkers for the corresponding axioms, instance generators
(spatial, random, and adversarial), utility metrics, and a multi-trial
experiment runner — all with exact rational arithmetic where it matters and
deterministic, seedable randomness where it doesn't.
"""

from .axioms import (
    AXIOM_BY_NAME,
    AxiomKind,
    AxiomReport,
    BadSpec,
    DEFAULT_VOTER_LIMIT,
    EJR,
    GroupWitness,
    JR,
    PJR,
    QuotaWitness,
    SequenceWitness,
    TooManyVoters,
    VariantSpec,
    WEAK_EJR,
    WEAK_JR,
    WEAK_PJR,
    check_lower_quota_closed,
    check_pareto,
    check_representation,
    check_variant,
    find_closed_groups,
)
from .core import (
    BadConfig,
    BadIndex,
    DecisionInstance,
    EmptyInstance,
    EmptyRound,
    InstanceError,
    LengthMismatch,
    Round,
    SearchBudgetExceeded,
    SeqvoteError,
    agreement_rounds,
    make_instance,
    satisfied_round_count,
    utility_vector,
    validate,
    validate_decisions,
)
from .experiment import (
    CSV_HEADER,
    ExperimentConfig,
    RuleSpec,
    TrialFailure,
    load_experiment_config,
    parse_experiment_config,
    run_experiment,
    trial_seed,
    write_experiment,
)
from .gen import (
    AdversaryOutcome,
    ConstructionFailed,
    CounterexampleConfig,
    DISTRIBUTION_NAMES,
    EuclideanConfig,
    GuardExceeded,
    adversary_online,
    gen_counterexample,
    gen_euclidean,
    gen_random,
    voter_locations,
)
from .io import (
    FormatError,
    decisions_from_data,
    instance_from_dict,
    instance_to_dict,
    load_decisions,
    load_instance,
    mean_approval_size,
    run_output,
    save_instance,
)
from .metrics import (
    average_utility,
    gini_coefficient,
    nearest_rank,
    percentile_utility,
)
from .rules import (
    DEFAULT_NODE_BUDGET,
    KTooLarge,
    LocalSearchTrace,
    MesConfig,
    MesRound,
    MesState,
    MesTrace,
    OnlineRule,
    PavSwap,
    PavTrace,
    PhragmenRound,
    PhragmenState,
    PhragmenTrace,
    RULE_NAMES,
    ScoreTrace,
    ScoredRound,
    multiwinner_adapter,
    run_approval_voting,
    run_mes,
    run_named_rule,
    run_pav_exact,
    run_pav_local_search,
    run_perpetual_consensus,
    run_perpetual_quota,
    run_phragmen,
    run_round_robin,
)

__version__ = "0.1.0"
