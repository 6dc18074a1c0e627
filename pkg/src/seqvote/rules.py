"""Decision rules for sequential approval-based collective decisions.

Online rules (Sequential Phragmén and the baselines) decide each round from
past information only.  The Method of Equal Shares is semi-online: it needs
the horizon to price rounds.  Proportional Approval Voting and its local
search variant are offline.  All rules break ties toward the lowest
alternative index and use exact rational arithmetic throughout.

Every `run_*` function returns `(decisions, trace)` where `decisions` is a
list of alternative indices (possibly containing `None` holes when the Method
of Equal Shares runs with completion ``"none"``) and `trace` is a dataclass
recording the rule's internal bookkeeping round by round.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Iterable, Protocol, Sequence

from .core import (
    BadConfig,
    DecisionInstance,
    Round,
    SearchBudgetExceeded,
    utility_vector,
    validate,
    validate_decisions,
)

__all__ = [
    "RULE_NAMES",
    "run_named_rule",
    "KTooLarge",
    "OnlineRule",
    "PhragmenState",
    "PhragmenRound",
    "PhragmenTrace",
    "run_phragmen",
    "MesConfig",
    "MesState",
    "MesRound",
    "MesTrace",
    "run_mes",
    "PavTrace",
    "run_pav_exact",
    "PavSwap",
    "LocalSearchTrace",
    "run_pav_local_search",
    "ScoredRound",
    "ScoreTrace",
    "run_approval_voting",
    "run_round_robin",
    "run_perpetual_consensus",
    "run_perpetual_quota",
    "multiwinner_adapter",
]

#: Names accepted by the command line and the experiment runner.
RULE_NAMES = (
    "phragmen",
    "mes",
    "mes-offline",
    "pav",
    "pav-ls",
    "av",
    "rr",
    "quota",
    "consensus",
)

#: Node budget used by the exact search when the caller does not set one.
DEFAULT_NODE_BUDGET = 500_000


class KTooLarge(BadConfig):
    """A committee size outside 1..(number of candidates) was requested."""


def _frac(x: Fraction | None) -> str | None:
    return None if x is None else f"{x.numerator}/{x.denominator}"


def _fracs(xs: Iterable[Fraction]) -> list[str]:
    return [f"{x.numerator}/{x.denominator}" for x in xs]


class OnlineRule(Protocol):
    """A stateful rule deciding rounds one at a time."""

    def decide(self, round_: Round) -> int:
        """Decide the next round and update internal state."""
        ...


# ---------------------------------------------------------------------------
# Sequential Phragmén
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhragmenRound:
    """One round of Sequential Phragmén.

    `water_line` is the common load value assigned to the bearing voters
    (None when the round had no approvers at all and defaulted to index 0);
    `bearers` are the voters whose load was set to the water line; `loads`
    is the full load vector after the round.
    """

    decision: int
    water_line: Fraction | None
    bearers: tuple[int, ...]
    loads: tuple[Fraction, ...]

    def to_dict(self) -> dict:
        return {
            "decision": self.decision,
            "water_line": _frac(self.water_line),
            "bearers": list(self.bearers),
            "loads": _fracs(self.loads),
        }


@dataclass
class PhragmenTrace:
    rounds: list[PhragmenRound] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"rule": "phragmen", "rounds": [r.to_dict() for r in self.rounds]}


class PhragmenState:
    """Online load-balancing rule.

    Each voter carries a load, initially 0.  For an alternative `c` with a
    non-empty approver set, the candidate water line is the minimum over
    non-empty approver subsets `S` of `(sum of loads in S + 1) / |S|`; this
    minimum is attained by a prefix of the approvers sorted by current load,
    and ties in prefix length resolve toward the longer prefix.  The rule
    picks the alternative with the smallest water line (ties: lowest index),
    and sets every bearing voter's load to that water line.  A round in which
    nothing is approved decides index 0 and assigns no load.
    """

    def __init__(self, num_voters: int):
        if num_voters < 1:
            raise BadConfig("the rule needs at least one voter")
        self.loads: list[Fraction] = [Fraction(0)] * num_voters
        self.history: list[PhragmenRound] = []

    def decide(self, round_: Round) -> int:
        loads = self.loads
        best_s: Fraction | None = None
        best_c = -1
        best_bearers: list[int] = []
        for c in range(round_.num_alternatives):
            approvers = [i for i, a in enumerate(round_.approvals) if c in a]
            if not approvers:
                continue
            approvers.sort(key=lambda i: (loads[i], i))
            prefix_sum = Fraction(0)
            cand_s: Fraction | None = None
            cand_len = 0
            for t, i in enumerate(approvers, start=1):
                prefix_sum += loads[i]
                s = (prefix_sum + 1) / t
                if cand_s is None or s <= cand_s:
                    cand_s, cand_len = s, t
            assert cand_s is not None
            if best_s is None or cand_s < best_s:
                best_s, best_c, best_bearers = cand_s, c, approvers[:cand_len]
        if best_s is None:
            self.history.append(
                PhragmenRound(0, None, (), tuple(loads))
            )
            return 0
        for i in best_bearers:
            loads[i] = best_s
        self.history.append(
            PhragmenRound(best_c, best_s, tuple(sorted(best_bearers)), tuple(loads))
        )
        return best_c


def run_phragmen(instance: DecisionInstance) -> tuple[list[int], PhragmenTrace]:
    """Run Sequential Phragmén over the whole instance."""
    validate(instance)
    state = PhragmenState(instance.num_voters)
    decisions = [state.decide(round_) for round_ in instance.rounds]
    return decisions, PhragmenTrace(state.history)


# ---------------------------------------------------------------------------
# Method of Equal Shares
# ---------------------------------------------------------------------------

_COMPLETIONS = ("phragmen", "epsilon", "utilitarian", "none")


@dataclass(frozen=True)
class MesConfig:
    """Configuration for the Method of Equal Shares.

    `completion` decides what happens after premature termination:
    ``"phragmen"`` (default) hands all remaining rounds to a fresh Sequential
    Phragmén with zero loads; ``"utilitarian"`` decides them by approval
    count; ``"epsilon"`` adds the minimal uniform budget top-up that makes
    some current-round alternative affordable and continues; ``"none"``
    returns the partial sequence with `None` holes.  With `offline` the rule
    sees all rounds at once and repeatedly buys the globally cheapest
    (round, alternative) pair.
    """

    completion: str = "phragmen"
    offline: bool = False

    def __post_init__(self) -> None:
        if self.completion not in _COMPLETIONS:
            raise BadConfig(
                f"unknown completion {self.completion!r}; "
                f"expected one of {_COMPLETIONS}"
            )


@dataclass(frozen=True)
class MesRound:
    """One decided round.  `budgets` is the snapshot right after this row's
    action was applied (for offline runs, rows are created in purchase order
    but stored under their round index).  `source` says how the decision was
    made: a budgeted ``"purchase"``, one of the completion modes, a
    ``"no-approvers"`` default under epsilon completion, or ``"unfilled"``
    for a hole left by completion ``"none"``."""

    decision: int | None
    rho: Fraction | None
    payments: tuple[Fraction, ...]
    budgets: tuple[Fraction, ...]
    topup: Fraction | None
    source: str

    def to_dict(self) -> dict:
        return {
            "decision": self.decision,
            "rho": _frac(self.rho),
            "payments": _fracs(self.payments),
            "budgets": _fracs(self.budgets),
            "topup": _frac(self.topup),
            "source": self.source,
        }


@dataclass
class MesTrace:
    price: Fraction
    completion: str
    offline: bool
    premature_round: int | None = None
    rounds: list[MesRound] = field(default_factory=list)
    purchase_order: list[int] = field(default_factory=list)
    topups: list[Fraction] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rule": "mes-offline" if self.offline else "mes",
            "price": _frac(self.price),
            "completion": self.completion,
            "premature_round": self.premature_round,
            "rounds": [r.to_dict() for r in self.rounds],
            "purchase_order": list(self.purchase_order),
            "topups": _fracs(self.topups),
        }


def _min_rho(budgets: list[Fraction], price: Fraction) -> Fraction | None:
    """Minimal ρ with Σ min(b_i, ρ) ≥ price, or None if Σ b_i < price.

    Sort budgets ascending and find the largest suffix that can share the
    residual cost equally without any member paying more than their budget;
    everyone before the suffix pays their full budget.
    """
    ascending = sorted(budgets)
    paid = Fraction(0)
    m = len(ascending)
    for j, b in enumerate(ascending):
        rho = (price - paid) / (m - j)
        if rho <= b:
            return rho
        paid += b
    return None


def _approver_lists(round_: Round) -> list[list[int]]:
    lists: list[list[int]] = [[] for _ in round_.alternatives]
    for voter, approved in enumerate(round_.approvals):
        for alt in approved:
            lists[alt].append(voter)
    return lists


def _utilitarian_choice(round_: Round) -> int:
    counts = [0] * round_.num_alternatives
    for approved in round_.approvals:
        for alt in approved:
            counts[alt] += 1
    return max(range(len(counts)), key=lambda c: (counts[c], -c))


class MesState:
    """Streaming Method of Equal Shares over a known horizon.

    Usable as an :class:`OnlineRule`.  Completion ``"none"`` cannot stream
    (it must stop instead of deciding); use :func:`run_mes` for it.
    """

    def __init__(self, num_voters: int, num_rounds: int, completion: str = "phragmen"):
        if num_voters < 1 or num_rounds < 1:
            raise BadConfig("the rule needs at least one voter and one round")
        if completion not in ("phragmen", "epsilon", "utilitarian"):
            raise BadConfig(
                f"completion {completion!r} cannot decide rounds one at a time"
            )
        self.num_voters = num_voters
        self.price = Fraction(num_voters, num_rounds)
        self.budgets: list[Fraction] = [Fraction(1)] * num_voters
        self.completion = completion
        self.premature_round: int | None = None
        self.history: list[MesRound] = []
        self._round_index = 0
        self._phragmen: PhragmenState | None = None

    def _buy(self, round_: Round) -> tuple[int, Fraction, list[int]] | None:
        """Cheapest affordable alternative, or None if nothing is affordable."""
        best: tuple[int, Fraction, list[int]] | None = None
        for c, approvers in enumerate(_approver_lists(round_)):
            if not approvers:
                continue
            rho = _min_rho([self.budgets[i] for i in approvers], self.price)
            if rho is not None and (best is None or rho < best[1]):
                best = (c, rho, approvers)
        return best

    def _record_purchase(
        self,
        choice: tuple[int, Fraction, list[int]],
        topup: Fraction | None,
    ) -> int:
        c, rho, approvers = choice
        payments = [Fraction(0)] * self.num_voters
        for i in approvers:
            pay = min(self.budgets[i], rho)
            payments[i] = pay
            self.budgets[i] -= pay
        self.history.append(
            MesRound(c, rho, tuple(payments), tuple(self.budgets), topup, "purchase")
        )
        return c

    def _record_default(self, decision: int, source: str) -> int:
        zero = (Fraction(0),) * self.num_voters
        self.history.append(
            MesRound(decision, None, zero, tuple(self.budgets), None, source)
        )
        return decision

    def try_round(self, round_: Round) -> int | None:
        """Attempt a plain purchase; mark premature termination on failure."""
        choice = self._buy(round_)
        j = self._round_index
        self._round_index += 1
        if choice is None:
            if self.premature_round is None:
                self.premature_round = j
            return None
        return self._record_purchase(choice, None)

    def decide(self, round_: Round) -> int:
        if self.premature_round is not None and self.completion != "epsilon":
            self._round_index += 1
            return self._complete(round_)
        choice = self._buy(round_)
        j = self._round_index
        self._round_index += 1
        if choice is not None:
            return self._record_purchase(choice, None)
        if self.premature_round is None:
            self.premature_round = j
        if self.completion == "epsilon":
            return self._topup_and_buy(round_)
        if self.completion == "phragmen":
            self._phragmen = PhragmenState(self.num_voters)
        return self._complete(round_)

    def _topup_and_buy(self, round_: Round) -> int:
        """Minimal uniform top-up making some alternative affordable, then buy.

        No top-up can repair a round in which nothing is approved; such
        rounds decide index 0.
        """
        shortfalls = []
        for approvers in _approver_lists(round_):
            if approvers:
                missing = self.price - sum(self.budgets[i] for i in approvers)
                shortfalls.append(missing / len(approvers))
        if not shortfalls:
            return self._record_default(0, "no-approvers")
        delta = max(min(shortfalls), Fraction(0))
        self.budgets = [b + delta for b in self.budgets]
        choice = self._buy(round_)
        assert choice is not None, "a topped-up round must be affordable"
        return self._record_purchase(choice, delta if delta > 0 else None)

    def _complete(self, round_: Round) -> int:
        if self.completion == "phragmen":
            assert self._phragmen is not None
            c = self._phragmen.decide(round_)
            return self._record_default(c, "phragmen")
        c = _utilitarian_choice(round_)
        return self._record_default(c, "utilitarian")


def run_mes(
    instance: DecisionInstance, config: MesConfig | None = None
) -> tuple[list[int | None], MesTrace]:
    """Run the Method of Equal Shares (online unless `config.offline`)."""
    config = config or MesConfig()
    validate(instance)
    if config.offline:
        return _run_mes_offline(instance, config)
    n, T = instance.num_voters, instance.num_rounds
    if config.completion == "none":
        state = MesState(n, T, "phragmen")  # completion branch never reached
        decisions: list[int | None] = []
        for j, round_ in enumerate(instance.rounds):
            got = state.try_round(round_)
            if got is None:
                break
            decisions.append(got)
        while len(decisions) < T:
            decisions.append(None)
            state.history.append(
                MesRound(
                    None,
                    None,
                    (Fraction(0),) * n,
                    tuple(state.budgets),
                    None,
                    "unfilled",
                )
            )
        trace = MesTrace(state.price, "none", False, state.premature_round, state.history)
    else:
        state = MesState(n, T, config.completion)
        decisions = [state.decide(round_) for round_ in instance.rounds]
        trace = MesTrace(
            state.price,
            config.completion,
            False,
            state.premature_round,
            state.history,
        )
    trace.purchase_order = [
        j for j, row in enumerate(trace.rounds) if row.source == "purchase"
    ]
    trace.topups = [row.topup for row in trace.rounds if row.topup is not None]
    return decisions, trace


def _run_mes_offline(
    instance: DecisionInstance, config: MesConfig
) -> tuple[list[int | None], MesTrace]:
    """Offline variant: repeatedly buy the globally cheapest round/alternative.

    Ties break by (round index, alternative index).  When nothing remains
    affordable, the undecided rounds go to the completion rule in
    chronological order.
    """
    n, T = instance.num_voters, instance.num_rounds
    price = Fraction(n, T)
    budgets = [Fraction(1)] * n
    approvers_by_round = [_approver_lists(r) for r in instance.rounds]
    decisions: list[int | None] = [None] * T
    rows: dict[int, MesRound] = {}
    purchase_order: list[int] = []
    topups: list[Fraction] = []
    undecided = set(range(T))

    def cheapest() -> tuple[int, int, Fraction, list[int]] | None:
        best = None
        for j in sorted(undecided):
            for c, approvers in enumerate(approvers_by_round[j]):
                if not approvers:
                    continue
                rho = _min_rho([budgets[i] for i in approvers], price)
                if rho is not None and (best is None or rho < best[2]):
                    best = (j, c, rho, approvers)
        return best

    def buy(j: int, c: int, rho: Fraction, approvers: list[int], topup: Fraction | None) -> None:
        payments = [Fraction(0)] * n
        for i in approvers:
            pay = min(budgets[i], rho)
            payments[i] = pay
            budgets[i] -= pay
        decisions[j] = c
        rows[j] = MesRound(c, rho, tuple(payments), tuple(budgets), topup, "purchase")
        purchase_order.append(j)
        undecided.discard(j)

    def drain(topup: Fraction | None) -> None:
        first = topup
        while True:
            got = cheapest()
            if got is None:
                return
            buy(*got, first)
            first = None

    drain(None)
    premature = min(undecided) if undecided else None

    if undecided and config.completion == "phragmen":
        completer = PhragmenState(n)
        for j in sorted(undecided):
            c = completer.decide(instance.rounds[j])
            decisions[j] = c
            rows[j] = MesRound(
                c, None, (Fraction(0),) * n, tuple(budgets), None, "phragmen"
            )
        undecided.clear()
    elif undecided and config.completion == "utilitarian":
        for j in sorted(undecided):
            c = _utilitarian_choice(instance.rounds[j])
            decisions[j] = c
            rows[j] = MesRound(
                c, None, (Fraction(0),) * n, tuple(budgets), None, "utilitarian"
            )
        undecided.clear()
    elif undecided and config.completion == "epsilon":
        for j in sorted(undecided):
            if all(not a for a in approvers_by_round[j]):
                decisions[j] = 0
                rows[j] = MesRound(
                    0, None, (Fraction(0),) * n, tuple(budgets), None, "no-approvers"
                )
                undecided.discard(j)
        while undecided:
            shortfalls = []
            for j in sorted(undecided):
                for approvers in approvers_by_round[j]:
                    if approvers:
                        missing = price - sum(budgets[i] for i in approvers)
                        shortfalls.append(missing / len(approvers))
            delta = max(min(shortfalls), Fraction(0))
            if delta > 0:
                topups.append(delta)
                for i in range(n):
                    budgets[i] += delta
            drain(delta if delta > 0 else None)
    if undecided:  # completion "none": leave holes
        for j in sorted(undecided):
            rows[j] = MesRound(
                None, None, (Fraction(0),) * n, tuple(budgets), None, "unfilled"
            )

    trace = MesTrace(
        price,
        config.completion,
        True,
        premature,
        [rows[j] for j in range(T)],
        purchase_order,
        topups,
    )
    return decisions, trace


# ---------------------------------------------------------------------------
# Proportional Approval Voting (exact and local search)
# ---------------------------------------------------------------------------


@dataclass
class PavTrace:
    score: Fraction
    nodes_explored: int
    node_budget: int

    def to_dict(self) -> dict:
        return {
            "rule": "pav",
            "score": _frac(self.score),
            "nodes_explored": self.nodes_explored,
            "node_budget": self.node_budget,
        }


@dataclass(frozen=True)
class PavSwap:
    round: int
    old: int
    new: int
    gain: Fraction

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "old": self.old,
            "new": self.new,
            "gain": _frac(self.gain),
        }


@dataclass
class LocalSearchTrace:
    initial: list[int]
    swaps: list[PavSwap]
    score: Fraction
    min_gain: Fraction

    def to_dict(self) -> dict:
        return {
            "rule": "pav-ls",
            "initial": list(self.initial),
            "swaps": [s.to_dict() for s in self.swaps],
            "score": _frac(self.score),
            "min_gain": _frac(self.min_gain),
        }


def _harmonic_table(T: int) -> tuple[int, list[int], list[int]]:
    """Integer-scaled harmonic numbers.

    Returns `(L, H, gain)` where `L = lcm(1..T)`, `H[u] = L·(1 + 1/2 + … + 1/u)`
    and `gain[u] = L/(u+1)`, all exact integers.
    """
    L = lcm(*range(1, T + 1))
    H = [0] * (T + 1)
    for u in range(1, T + 1):
        H[u] = H[u - 1] + L // u
    gain = [L // (u + 1) for u in range(T + 1)]
    return L, H, gain


def run_pav_local_search(
    instance: DecisionInstance, initial: Sequence[int] | None = None
) -> tuple[list[int], LocalSearchTrace]:
    """Local search on the harmonic welfare score.

    Starting from `initial` (default: the approval voting sequence), scan
    rounds ascending and alternatives ascending, apply the first single-round
    swap whose exact score gain is at least n/T², restart the scan, and stop
    when no swap qualifies.
    """
    validate(instance)
    n, T = instance.num_voters, instance.num_rounds
    L, H, gain = _harmonic_table(T)
    if initial is None:
        initial, _ = run_approval_voting(instance)
    else:
        validate_decisions(instance, initial)
        if any(d is None for d in initial):
            raise BadConfig("the initial sequence must decide every round")
        initial = list(initial)
    decisions = list(initial)
    approver_lists = [instance.approver_sets(j) for j in range(T)]
    approver_sets = [[frozenset(a) for a in row] for row in approver_lists]
    util = list(utility_vector(instance, decisions))
    threshold = n * L  # compare delta·T² against n·L
    T2 = T * T
    swaps: list[PavSwap] = []

    while True:
        improved = False
        for j in range(T):
            old = decisions[j]
            old_set = approver_sets[j][old]
            lists_j = approver_lists[j]
            for c in range(len(lists_j)):
                if c == old:
                    continue
                delta = 0
                for i in lists_j[c]:
                    if i not in old_set:
                        delta += gain[util[i]]
                new_set = approver_sets[j][c]
                for i in lists_j[old]:
                    if i not in new_set:
                        delta -= L // util[i]
                if delta * T2 >= threshold:
                    for i in lists_j[c]:
                        if i not in old_set:
                            util[i] += 1
                    for i in lists_j[old]:
                        if i not in new_set:
                            util[i] -= 1
                    decisions[j] = c
                    swaps.append(PavSwap(j, old, c, Fraction(delta, L)))
                    improved = True
                    break
            if improved:
                break
        if not improved:
            break

    score = Fraction(sum(H[u] for u in util), L)
    trace = LocalSearchTrace(list(initial), swaps, score, Fraction(n, T2))
    return decisions, trace


def run_pav_exact(
    instance: DecisionInstance, *, node_budget: int = DEFAULT_NODE_BUDGET
) -> tuple[list[int], PavTrace]:
    """Exact harmonic-welfare maximization by branch and bound.

    Maximizes Σ_i (1 + 1/2 + … + 1/u_i) over all decision sequences, with
    exact arithmetic (integer-scaled by lcm(1..T)).  Among all optima the
    lexicographically smallest sequence of alternative indices is returned.
    The admissible bound adds, for every remaining round, the best
    single-round gain frozen at current utilities; marginal gains only shrink
    as utilities grow, so the bound never underestimates.  Raises
    :class:`SearchBudgetExceeded` when more than `node_budget` nodes would be
    explored.
    """
    validate(instance)
    n, T = instance.num_voters, instance.num_rounds
    L, H, gain = _harmonic_table(T)
    approvers = [instance.approver_sets(j) for j in range(T)]

    # Strong incumbent from local search: optimum score ≥ incumbent, so
    # starting the search one unit below it keeps every optimal leaf alive
    # while pruning hard.
    incumbent, _ = run_pav_local_search(instance)
    best_score = sum(H[u] for u in utility_vector(instance, incumbent)) - 1
    best_seq: list[int] | None = None
    util = [0] * n
    seq = [0] * T
    nodes = 0

    def dfs(j: int, score: int) -> None:
        nonlocal best_score, best_seq, nodes
        if j == T:
            if score > best_score:
                best_score = score
                best_seq = seq.copy()
            return
        bound = score
        for jj in range(j, T):
            best_gain = 0
            for apps in approvers[jj]:
                g = 0
                for i in apps:
                    g += gain[util[i]]
                if g > best_gain:
                    best_gain = g
            bound += best_gain
        if bound <= best_score:
            return
        for c, apps in enumerate(approvers[j]):
            nodes += 1
            if nodes > node_budget:
                raise SearchBudgetExceeded(
                    f"exact search exceeded {node_budget} nodes; "
                    f"raise the node budget or use the local-search rule"
                )
            g = 0
            for i in apps:
                g += gain[util[i]]
            seq[j] = c
            for i in apps:
                util[i] += 1
            dfs(j + 1, score + g)
            for i in apps:
                util[i] -= 1
        seq[j] = 0

    dfs(0, 0)
    assert best_seq is not None
    return best_seq, PavTrace(Fraction(best_score, L), nodes, node_budget)


# ---------------------------------------------------------------------------
# Baselines: approval voting, round robin, consensus, quota
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScoredRound:
    """One round of a score-driven baseline; `detail` holds the per-round
    bookkeeping that drove the choice (documented per rule)."""

    decision: int
    detail: dict

    def to_dict(self) -> dict:
        return {"decision": self.decision, **self.detail}


@dataclass
class ScoreTrace:
    rule: str
    rounds: list[ScoredRound] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"rule": self.rule, "rounds": [r.to_dict() for r in self.rounds]}


def run_approval_voting(instance: DecisionInstance) -> tuple[list[int], ScoreTrace]:
    """Pick the most-approved alternative each round (ties: lowest index)."""
    validate(instance)
    trace = ScoreTrace("av")
    decisions = []
    for round_ in instance.rounds:
        counts = [0] * round_.num_alternatives
        for approved in round_.approvals:
            for alt in approved:
                counts[alt] += 1
        chosen = max(range(len(counts)), key=lambda c: (counts[c], -c))
        decisions.append(chosen)
        trace.rounds.append(ScoredRound(chosen, {"approvals": counts}))
    return decisions, trace


def run_round_robin(instance: DecisionInstance) -> tuple[list[int], ScoreTrace]:
    """Voters take turns dictating the decision.

    Round j (0-based) designates voter j mod n; a voter with an empty
    approval set passes to the next voter cyclically.  The picker's
    lowest-index approved alternative wins; if every voter approves nothing,
    the round decides index 0.
    """
    validate(instance)
    n = instance.num_voters
    trace = ScoreTrace("rr")
    decisions = []
    for j, round_ in enumerate(instance.rounds):
        chosen = 0
        picker: int | None = None
        for step in range(n):
            voter = (j + step) % n
            if round_.approvals[voter]:
                picker = voter
                chosen = min(round_.approvals[voter])
                break
        decisions.append(chosen)
        trace.rounds.append(ScoredRound(chosen, {"picker": picker}))
    return decisions, trace


def run_perpetual_consensus(instance: DecisionInstance) -> tuple[list[int], ScoreTrace]:
    """Zero-sum weight ledger favoring under-served voters.

    Each decided round adds 1 to every voter's weight, picks the alternative
    maximizing the sum of its supporters' weights (ties: lowest index), and
    charges the winner's supporters n/|supporters| each, returning the total
    weight to zero.  A round in which nothing is approved decides index 0
    and leaves the ledger untouched.
    """
    validate(instance)
    n = instance.num_voters
    weights = [Fraction(0)] * n
    trace = ScoreTrace("consensus")
    decisions = []
    for round_ in instance.rounds:
        approvers = _approver_lists(round_)
        if all(not a for a in approvers):
            decisions.append(0)
            trace.rounds.append(ScoredRound(0, {"weights": _fracs(weights)}))
            continue
        for i in range(n):
            weights[i] += 1
        best_sum: Fraction | None = None
        chosen = -1
        for c, apps in enumerate(approvers):
            if not apps:
                continue
            total = sum(weights[i] for i in apps)
            if best_sum is None or total > best_sum:
                best_sum, chosen = total, c
        charge = Fraction(n, len(approvers[chosen]))
        for i in approvers[chosen]:
            weights[i] -= charge
        decisions.append(chosen)
        trace.rounds.append(ScoredRound(chosen, {"weights": _fracs(weights)}))
    return decisions, trace


def run_perpetual_quota(instance: DecisionInstance) -> tuple[list[int], ScoreTrace]:
    """Track per-voter entitlements and serve voters behind on theirs.

    Each round, every voter with a non-empty approval set gains quota equal
    to the largest supporter share among their approved alternatives
    (max |supporters(c)|/n).  The round picks the alternative with the most
    supporters whose satisfaction count is strictly below their quota (ties:
    more supporters, then lowest index), then increments the winner's
    supporters' satisfaction.
    """
    validate(instance)
    n = instance.num_voters
    quota = [Fraction(0)] * n
    sat = [0] * n
    trace = ScoreTrace("quota")
    decisions = []
    for round_ in instance.rounds:
        approvers = _approver_lists(round_)
        counts = [len(a) for a in approvers]
        for i, approved in enumerate(round_.approvals):
            if approved:
                best_support = max(counts[c] for c in approved)
                quota[i] += Fraction(best_support, n)
        best_key: tuple[int, int] | None = None
        chosen = 0
        for c, apps in enumerate(approvers):
            eligible = sum(1 for i in apps if sat[i] < quota[i])
            key = (eligible, counts[c])
            if best_key is None or key > best_key:
                best_key, chosen = key, c
        for i in approvers[chosen]:
            sat[i] += 1
        decisions.append(chosen)
        trace.rounds.append(
            ScoredRound(
                chosen,
                {"quota": _fracs(quota), "satisfaction": list(sat)},
            )
        )
    return decisions, trace


def run_named_rule(
    name: str,
    instance: DecisionInstance,
    *,
    completion: str = "phragmen",
    node_budget: int = DEFAULT_NODE_BUDGET,
):
    """Dispatch a rule by its command-line name.

    `completion` applies to the Method of Equal Shares variants and
    `node_budget` to the exact search; both are ignored elsewhere.
    """
    if name == "phragmen":
        return run_phragmen(instance)
    if name == "mes":
        return run_mes(instance, MesConfig(completion=completion))
    if name == "mes-offline":
        return run_mes(instance, MesConfig(completion=completion, offline=True))
    if name == "pav":
        return run_pav_exact(instance, node_budget=node_budget)
    if name == "pav-ls":
        return run_pav_local_search(instance)
    if name == "av":
        return run_approval_voting(instance)
    if name == "rr":
        return run_round_robin(instance)
    if name == "quota":
        return run_perpetual_quota(instance)
    if name == "consensus":
        return run_perpetual_consensus(instance)
    raise BadConfig(f"unknown rule {name!r}; expected one of {RULE_NAMES}")


# ---------------------------------------------------------------------------
# Multi-winner adapter
# ---------------------------------------------------------------------------


def multiwinner_adapter(
    approval_sets: Sequence[Iterable[int]],
    num_candidates: int,
    k: int,
    rule_factory: Callable[[int, int], OnlineRule] | None = None,
) -> list[int]:
    """Select a size-`k` committee with an online rule, one seat at a time.

    A single approval profile over candidates 0..num_candidates−1 is turned
    into an adaptive sequence of rounds: each round offers the candidates not
    yet selected, with approvals restricted accordingly, and the online
    rule's decision takes the next seat.  Extending `k` extends the sequence,
    so committees are nested by construction.

    `rule_factory(num_voters, num_candidates)` builds the stateful rule;
    the default is Sequential Phragmén.
    """
    n = len(approval_sets)
    if n < 1:
        raise BadConfig("the profile needs at least one voter")
    if num_candidates < 1:
        raise BadConfig("the profile needs at least one candidate")
    profile = [frozenset(a) for a in approval_sets]
    for i, approved in enumerate(profile):
        for c in approved:
            if not (0 <= c < num_candidates):
                raise BadConfig(
                    f"voter {i} approves candidate {c}, "
                    f"but candidates are 0..{num_candidates - 1}"
                )
    if not (1 <= k <= num_candidates):
        raise KTooLarge(
            f"committee size {k} is outside 1..{num_candidates}"
        )
    if rule_factory is None:
        rule_factory = lambda voters, _horizon: PhragmenState(voters)
    rule = rule_factory(n, num_candidates)
    remaining = list(range(num_candidates))
    selected: list[int] = []
    for _ in range(k):
        position = {c: idx for idx, c in enumerate(remaining)}
        round_ = Round(
            tuple(f"c{c}" for c in remaining),
            tuple(
                frozenset(position[c] for c in approved if c in position)
                for approved in profile
            ),
        )
        idx = rule.decide(round_)
        selected.append(remaining.pop(idx))
    return selected
