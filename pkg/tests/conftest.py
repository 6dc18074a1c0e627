"""Shared fixtures: small hand-built instances with known behavior.

Each fixture is a `DecisionInstance` whose interesting properties (rule
outputs, axiom verdicts, welfare optima) were derived by hand and are frozen
in the tests; the oracles module re-derives most of them independently.
"""

from __future__ import annotations

import pytest

from seqvote import make_instance


@pytest.fixture
def ejr_contrast_instance():
    """4 voters, 8 rounds; one sequence spreads satisfaction wide, another
    concentrates it — separating union-style from best-member axioms.

    Rounds 0-5 offer a,b,c,d: voter 0 -> {a,b}, voter 1 -> {a,c},
    voters 2 and 3 -> {d}.  Rounds 6-7 offer a,b,c,e,f: voters 0 and 1 as
    before, voter 2 -> {e}, voter 3 -> {f}.
    """
    early = [[0, 1], [0, 2], [3], [3]]
    late = [[0, 1], [0, 2], [3], [4]]
    rounds = [(["a", "b", "c", "d"], early)] * 6
    rounds += [(["a", "b", "c", "e", "f"], late)] * 2
    return make_instance(4, rounds)


@pytest.fixture
def alternation_instance():
    """10 voters, 10 identical rounds over a,b,c with overlapping camps.

    Voters 0-2 -> {a,b}, voters 3-6 -> {a,c}, voters 7-8 -> {b,c},
    voter 9 -> {b}.  Load balancing alternates a,b,a,b,... here, leaving the
    four-voter camp {3,4,5,6} with half the rounds it could demand as a
    six-voter group with voters 7,8.
    """
    approvals = [[0, 1]] * 3 + [[0, 2]] * 4 + [[1, 2]] * 2 + [[1]]
    return make_instance(10, [(["a", "b", "c"], approvals)] * 10)


@pytest.fixture
def budget_tail_instance():
    """8 voters, 16 rounds; a block majority drains the minority's budget.

    Rounds 0-9 offer a,b: voters 0-2 -> {a}, voters 3-7 -> {b}.  Rounds
    10-15 offer b,c,d,e: voter 0 -> {c}, voter 1 -> {d}, voter 2 -> {e},
    voters 3-7 -> {b}.  Equal shares keeps buying b early, then serves the
    singletons late — never a, so the {0,1,2} camp's best member stays at 2.
    """
    early = [[0]] * 3 + [[1]] * 5
    late = [[1], [2], [3]] + [[0]] * 5
    rounds = [(["a", "b"], early)] * 10
    rounds += [(["b", "c", "d", "e"], late)] * 6
    return make_instance(8, rounds)


@pytest.fixture
def premature_stop_instance():
    """3 voters, 6 rounds; the paying voters run dry before the horizon ends.

    Rounds 0-2 offer a,b: voter 0 -> {a}, voters 1,2 -> {b}.  Rounds 3-5
    offer only b: voter 0 approves nothing, voters 1,2 -> {b}.  Equal shares
    buys b four times and then nobody can pay, though voter 0 still has a
    full budget and an unserved claim on a.
    """
    early = [[0], [1], [1]]
    late = [[], [0], [0]]
    rounds = [(["a", "b"], early)] * 3 + [(["b"], late)] * 3
    return make_instance(3, rounds)


@pytest.fixture
def pareto_trap_instance():
    """7 voters, 7 rounds; online rules waste the early common ground.

    Rounds 0-1 offer a,b: voters 0,1 -> {a}, voters 2-6 -> {b}.  Rounds 2-6
    offer b,c,d: voter 0 -> {c}, voter 1 -> {d}, voters 2-6 -> {b}.  Online
    rules pick b early and pay voters 0 and 1 back with c and d later; the
    sequence a,a,b,b,b,b,b makes both strictly better off and nobody worse.
    """
    early = [[0], [0]] + [[1]] * 5
    late = [[1], [2]] + [[0]] * 5
    rounds = [(["a", "b"], early)] * 2 + [(["b", "c", "d"], late)] * 5
    return make_instance(7, rounds)
