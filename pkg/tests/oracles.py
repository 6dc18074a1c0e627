"""Independent brute-force reference implementations for the test suite.

Everything in this module is deliberately naive: direct definitions, full
enumeration, exact `Fraction` arithmetic, no bitmasks, no pruning, no shared
code with the package beyond the core data model.  The production
implementations must agree with these on small instances; several tests
freeze values computed here by hand as well.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

from seqvote.core import DecisionInstance


# ---------------------------------------------------------------------------
# Utilities and satisfaction, straight from the definitions
# ---------------------------------------------------------------------------


def naive_utilities(
    instance: DecisionInstance, decisions: Sequence[int | None]
) -> list[int]:
    """Per voter: count of decided rounds whose decision the voter approves."""
    util = [0] * instance.num_voters
    for j, d in enumerate(decisions):
        if d is None:
            continue
        for i in range(instance.num_voters):
            if d in instance.rounds[j].approvals[i]:
                util[i] += 1
    return util


def naive_agreement_rounds(
    instance: DecisionInstance, group: Iterable[int]
) -> list[int]:
    """Rounds in which all group members share at least one approved index."""
    members = list(group)
    agreed = []
    for j, round_ in enumerate(instance.rounds):
        common = set(round_.approvals[members[0]])
        for i in members[1:]:
            common &= round_.approvals[i]
        if common:
            agreed.append(j)
    return agreed


def naive_union_satisfaction(
    instance: DecisionInstance, decisions: Sequence[int | None], group: Iterable[int]
) -> int:
    """Decided rounds whose decision at least one group member approves."""
    members = list(group)
    count = 0
    for j, d in enumerate(decisions):
        if d is None:
            continue
        if any(d in instance.rounds[j].approvals[i] for i in members):
            count += 1
    return count


# ---------------------------------------------------------------------------
# Representation axioms by explicit level loops
# ---------------------------------------------------------------------------


def naive_axiom_check(
    instance: DecisionInstance,
    decisions: Sequence[int | None],
    family: str,
    weak: bool,
) -> dict | None:
    """First group violating the axiom, or None.

    Enumerates groups by size ascending then lexicographically.  The demand
    is the largest level ``ell`` with ``size >= ell * n / k`` (k being the
    group's agreement count, which must equal the horizon for weak axioms),
    capped at 1 for the ``"jr"`` family.  Observed satisfaction counts rounds
    some member approves for ``"jr"``/``"pjr"`` and takes the best single
    member's utility for ``"ejr"``.
    """
    n, T = instance.num_voters, instance.num_rounds
    utilities = naive_utilities(instance, decisions)
    for size in range(1, n + 1):
        for group in combinations(range(n), size):
            agreed = naive_agreement_rounds(instance, group)
            k = len(agreed)
            if weak and k != T:
                continue
            if k == 0:
                continue
            demand = 0
            for ell in range(1, T + 1):
                if Fraction(size) >= Fraction(ell * n, k):
                    demand = ell
            if family == "jr":
                demand = min(demand, 1)
            if family == "ejr":
                observed = max(utilities[i] for i in group)
            else:
                observed = naive_union_satisfaction(instance, decisions, group)
            if demand >= 1 and observed < demand:
                return {
                    "group": group,
                    "agreement_rounds": tuple(agreed),
                    "demand": demand,
                    "observed": observed,
                }
    return None


def naive_variant_check(
    instance: DecisionInstance,
    decisions: Sequence[int | None],
    size_slack: Fraction,
    agreement_threshold: str,
    satisfaction_target: str,
    alpha: Fraction,
) -> dict | None:
    """First group violating the parameterized share-style axiom, or None.

    For every group, every level ``ell`` is tested directly against the
    mode's definition; the group's level is the largest feasible ``ell``:

    * ``"actual"``: size >= (ell - eps) * n / k;
    * ``"ell"``: ell <= k and size >= (ell - eps) * n / T;
    * ``"ell-over-alpha"``: ell / alpha <= k and size >= (ell - eps) * n / T.

    The target is the level itself or floor(alpha * level).  Union-style
    satisfaction is compared against the target.
    """
    eps = Fraction(size_slack)
    alpha = Fraction(alpha)
    n, T = instance.num_voters, instance.num_rounds
    highest = T + int(eps) + 2  # levels cannot exceed T + eps
    for size in range(1, n + 1):
        for group in combinations(range(n), size):
            agreed = naive_agreement_rounds(instance, group)
            k = len(agreed)
            if k == 0:
                continue
            level = 0
            for ell in range(1, highest + 1):
                if agreement_threshold == "actual":
                    ok = Fraction(size) >= (Fraction(ell) - eps) * Fraction(n, k)
                elif agreement_threshold == "ell":
                    ok = ell <= k and (
                        Fraction(size) >= (Fraction(ell) - eps) * Fraction(n, T)
                    )
                else:  # "ell-over-alpha"
                    ok = Fraction(ell) / alpha <= k and (
                        Fraction(size) >= (Fraction(ell) - eps) * Fraction(n, T)
                    )
                if ok:
                    level = ell
            if satisfaction_target == "alpha-ell":
                scaled = alpha * level
                target = scaled.numerator // scaled.denominator
            else:
                target = level
            observed = naive_union_satisfaction(instance, decisions, group)
            if target >= 1 and observed < target:
                return {
                    "group": group,
                    "agreement_rounds": tuple(agreed),
                    "demand": target,
                    "observed": observed,
                }
    return None


# ---------------------------------------------------------------------------
# Closed groups and per-member lower quota
# ---------------------------------------------------------------------------


def naive_closed_groups(instance: DecisionInstance) -> list[tuple[int, ...]]:
    """Identical-approval-vector classes with no overlap with outsiders."""
    n = instance.num_voters
    vector = [
        tuple(round_.approvals[i] for round_ in instance.rounds) for i in range(n)
    ]
    classes: list[list[int]] = []
    for i in range(n):
        for cls in classes:
            if vector[cls[0]] == vector[i]:
                cls.append(i)
                break
        else:
            classes.append([i])

    closed = []
    for cls in classes:
        ok = True
        for member in cls:
            for outsider in range(n):
                if outsider in cls:
                    continue
                for j in range(instance.num_rounds):
                    shared = set(instance.rounds[j].approvals[member]) & set(
                        instance.rounds[j].approvals[outsider]
                    )
                    if shared:
                        ok = False
        if ok:
            closed.append(tuple(cls))
    return sorted(closed, key=lambda g: g[0])


def naive_lower_quota(
    instance: DecisionInstance,
    decisions: Sequence[int | None],
    perpetual: bool = False,
) -> dict | None:
    """First closed-group member under quota, or None.

    Every member of a closed group of size s must approve at least
    floor(k*s/n) of the first k decided rounds — for k the full horizon, or
    every k when `perpetual`.  Enumeration: groups by smallest member, then
    k ascending, then members ascending.
    """
    n, T = instance.num_voters, instance.num_rounds
    lengths = range(1, T + 1) if perpetual else [T]
    for group in naive_closed_groups(instance):
        for k in lengths:
            quota_exact = Fraction(k * len(group), n)
            quota = quota_exact.numerator // quota_exact.denominator
            if quota < 1:
                continue
            for member in group:
                observed = 0
                for j in range(k):
                    d = decisions[j]
                    if d is not None and d in instance.rounds[j].approvals[member]:
                        observed += 1
                if observed < quota:
                    return {
                        "group": group,
                        "member": member,
                        "prefix_rounds": k,
                        "quota": quota,
                        "observed": observed,
                    }
    return None


# ---------------------------------------------------------------------------
# Dominance by full enumeration
# ---------------------------------------------------------------------------


def all_decision_sequences(instance: DecisionInstance):
    """Every complete decision sequence, in lexicographic index order."""
    return product(*(range(r.num_alternatives) for r in instance.rounds))


def naive_pareto_witness(
    instance: DecisionInstance, decisions: Sequence[int | None]
) -> tuple[int, ...] | None:
    """Lexicographically first sequence dominating `decisions`, or None."""
    base = naive_utilities(instance, decisions)
    for candidate in all_decision_sequences(instance):
        util = naive_utilities(instance, candidate)
        if all(u >= b for u, b in zip(util, base)) and any(
            u > b for u, b in zip(util, base)
        ):
            return candidate
    return None


# ---------------------------------------------------------------------------
# Load balancing by subset enumeration
# ---------------------------------------------------------------------------


def brute_water_line(
    loads: Sequence[Fraction], approvers: Sequence[int]
) -> tuple[Fraction, tuple[int, ...]]:
    """Minimal (1 + sum of member loads)/|members| over non-empty member sets.

    Returns the minimum and the unique largest minimizing subset (sorted).
    """
    best: Fraction | None = None
    minimizers: list[tuple[int, ...]] = []
    for size in range(1, len(approvers) + 1):
        for subset in combinations(approvers, size):
            s = (1 + sum(loads[i] for i in subset)) / Fraction(size)
            if best is None or s < best:
                best, minimizers = s, [subset]
            elif s == best:
                minimizers.append(subset)
    assert best is not None
    largest = max(minimizers, key=len)
    assert sum(1 for m in minimizers if len(m) == len(largest)) == 1, (
        "the largest minimizing subset should be unique"
    )
    return best, tuple(sorted(largest))


def brute_phragmen(
    instance: DecisionInstance,
) -> list[tuple[int, Fraction | None, tuple[int, ...]]]:
    """Round-by-round load balancing: per round (decision, line, bearers)."""
    loads = [Fraction(0)] * instance.num_voters
    out: list[tuple[int, Fraction | None, tuple[int, ...]]] = []
    for round_ in instance.rounds:
        best_s: Fraction | None = None
        best = (0, None, ())
        for c in range(round_.num_alternatives):
            approvers = [i for i in range(instance.num_voters) if c in round_.approvals[i]]
            if not approvers:
                continue
            s, bearers = brute_water_line(loads, approvers)
            if best_s is None or s < best_s:
                best_s, best = s, (c, s, bearers)
        if best_s is not None:
            for i in best[2]:
                loads[i] = best_s
        out.append(best)
    return out


# ---------------------------------------------------------------------------
# Harmonic welfare by full enumeration
# ---------------------------------------------------------------------------


def harmonic(u: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, u + 1)), Fraction(0))


def harmonic_score(
    instance: DecisionInstance, decisions: Sequence[int | None]
) -> Fraction:
    return sum(
        (harmonic(u) for u in naive_utilities(instance, decisions)), Fraction(0)
    )


def enumerate_best_harmonic(
    instance: DecisionInstance,
) -> tuple[tuple[int, ...], Fraction]:
    """Highest harmonic-welfare sequence; ties go to the lexicographic first."""
    best_seq: tuple[int, ...] | None = None
    best_score: Fraction | None = None
    for candidate in all_decision_sequences(instance):
        score = harmonic_score(instance, candidate)
        if best_score is None or score > best_score:
            best_seq, best_score = candidate, score
    assert best_seq is not None and best_score is not None
    return best_seq, best_score


# ---------------------------------------------------------------------------
# Equal-shares pricing by subset enumeration
# ---------------------------------------------------------------------------


def brute_min_rho(
    budgets: Sequence[Fraction], price: Fraction
) -> Fraction | None:
    """Minimal x with sum(min(b, x)) >= price, or None when budgets fall short.

    Candidate values come from solving each saturation pattern directly: for
    every proper subset P paying its full budget, the rest split the residue
    equally.  The answer is the smallest candidate that actually covers the
    price.
    """
    m = len(budgets)
    if sum(budgets, Fraction(0)) < price:
        return None

    def covered(x: Fraction) -> bool:
        return sum((min(b, x) for b in budgets), Fraction(0)) >= price

    candidates = []
    for r in range(m):
        for subset in combinations(range(m), r):
            rest = m - r
            x = (price - sum((budgets[i] for i in subset), Fraction(0))) / rest
            if x > 0 and covered(x):
                candidates.append(x)
    assert candidates, "a coverable price must have a covering candidate"
    return min(candidates)


def cheapest_alternative(
    instance: DecisionInstance, j: int, budgets: Sequence[Fraction], price: Fraction
) -> tuple[int, Fraction] | None:
    """Lowest-rho alternative of round j (ties: lowest index), or None."""
    best: tuple[int, Fraction] | None = None
    for c in range(instance.rounds[j].num_alternatives):
        approvers = [
            i for i in range(instance.num_voters)
            if c in instance.rounds[j].approvals[i]
        ]
        if not approvers:
            continue
        rho = brute_min_rho([budgets[i] for i in approvers], price)
        if rho is not None and (best is None or rho < best[1]):
            best = (c, rho)
    return best


def naive_utilitarian_choice(instance: DecisionInstance, j: int) -> int:
    """Most approvals in round j, ties toward the lowest index."""
    round_ = instance.rounds[j]
    counts = [
        sum(1 for i in range(instance.num_voters) if c in round_.approvals[i])
        for c in range(round_.num_alternatives)
    ]
    best = 0
    for c in range(1, len(counts)):
        if counts[c] > counts[best]:
            best = c
    return best


def validate_online_mes_trace(instance: DecisionInstance, decisions, trace) -> None:
    """Replay an online equal-shares trace and assert every step.

    Checks, per purchase: the recomputed cheapest alternative and its exact
    price split; per completion row: untouched budgets and a consistent
    decision; globally: the premature round and budget evolution.
    """
    n = instance.num_voters
    price = trace.price
    assert price == Fraction(n, instance.num_rounds)
    budgets = [Fraction(1)] * n
    first_failure: int | None = None
    suffix_rounds: list[int] = []  # rounds delegated to load balancing

    for j, row in enumerate(trace.rounds):
        assert decisions[j] == row.decision
        if row.topup is not None:
            assert row.source == "purchase" and row.topup > 0
            if first_failure is None:
                first_failure = j
            budgets = [b + row.topup for b in budgets]
        if row.source == "purchase":
            got = cheapest_alternative(instance, j, budgets, price)
            assert got is not None, f"round {j}: purchase recorded but nothing affordable"
            c, rho = got
            assert row.decision == c and row.rho == rho
            paid = Fraction(0)
            for i in range(n):
                if c in instance.rounds[j].approvals[i]:
                    expect = min(budgets[i], rho)
                else:
                    expect = Fraction(0)
                assert row.payments[i] == expect
                budgets[i] -= expect
                paid += expect
            assert paid == price
        else:
            if first_failure is None:
                first_failure = j
            assert row.rho is None
            assert all(p == 0 for p in row.payments)
            if row.source == "no-approvers":
                assert row.decision == 0
                assert all(not a for a in instance.rounds[j].approvals)
            elif row.source == "utilitarian":
                assert row.decision == naive_utilitarian_choice(instance, j)
            elif row.source == "phragmen":
                suffix_rounds.append(j)
            elif row.source == "unfilled":
                assert row.decision is None
            else:
                raise AssertionError(f"unknown source {row.source!r}")
        assert list(row.budgets) == budgets
        assert all(b >= 0 for b in budgets)

    assert trace.premature_round == first_failure
    if suffix_rounds:
        assert suffix_rounds == list(
            range(suffix_rounds[0], instance.num_rounds)
        ), "load-balancing completion must take over for good"
        sub = DecisionInstance(
            n, tuple(instance.rounds[j] for j in suffix_rounds)
        )
        expected = [row[0] for row in brute_phragmen(sub)]
        assert [decisions[j] for j in suffix_rounds] == expected


def naive_offline_purchases(
    instance: DecisionInstance,
) -> tuple[dict[int, int], list[int], list[Fraction]]:
    """Global cheapest-first buying with equal budgets, until nothing is affordable.

    Returns (decisions by round, purchase order, final budgets).
    """
    n, T = instance.num_voters, instance.num_rounds
    price = Fraction(n, T)
    budgets = [Fraction(1)] * n
    decided: dict[int, int] = {}
    order: list[int] = []
    while True:
        best: tuple[Fraction, int, int] | None = None
        for j in range(T):
            if j in decided:
                continue
            got = cheapest_alternative(instance, j, budgets, price)
            if got is None:
                continue
            c, rho = got
            if best is None or rho < best[0]:
                best = (rho, j, c)
        if best is None:
            return decided, order, budgets
        rho, j, c = best
        for i in range(n):
            if c in instance.rounds[j].approvals[i]:
                budgets[i] -= min(budgets[i], rho)
        decided[j] = c
        order.append(j)
