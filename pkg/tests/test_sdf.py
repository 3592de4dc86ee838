import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from golden import FIG1_G, FIG2_GA, FIG2_GB
from psadf.expr import TimeExpr
from psadf.maxplus import MaxPlusMatrix, build_mpag, brute_force_mcm, mcm, throughput_from_matrix
from psadf.model import DeadlockError
from psadf.modelfile import parse_model
from psadf.sdf import (
    ConservativeApproximationWarning,
    Fsm,
    ScenarioSet,
    evolve,
    extract_numeric_matrix,
    sadf_worstcase_matrix,
)


def test_fig1_matrix_matches_printed(fig1):
    assert extract_numeric_matrix(fig1.graph) == MaxPlusMatrix.from_rows(FIG1_G, fig1.graph.labels)


def test_fig1_first_iteration(fig1):
    m = extract_numeric_matrix(fig1.graph)
    assert evolve(m, [0] * 5, 1) == (29, 33, 63, 0, 64)
    assert evolve(m, [0] * 5, 0) == (0, 0, 0, 0, 0)


def test_fig1_cycle_mean_of_printed_matrix(fig1):
    # the printed matrix has 13 finite entries and its heaviest cycle is the
    # t4 <-> t5 pair with weights 64 and 0
    m = MaxPlusMatrix.from_rows(FIG1_G)
    assert m.finite_count() == 13
    g = build_mpag(m)
    assert mcm(g) == (32, [3, 4])
    assert brute_force_mcm(g) == 32
    assert throughput_from_matrix(m) == Fraction(1, 32)


def test_fig2_scenario_matrices(fig2):
    sc = fig2.scenarios
    labels = fig2.graph.labels
    assert extract_numeric_matrix(sc.scenario("a")) == MaxPlusMatrix.from_rows(FIG2_GA, labels)
    assert extract_numeric_matrix(sc.scenario("b")) == MaxPlusMatrix.from_rows(FIG2_GB, labels)


def test_fig2_combination(fig2):
    m = sadf_worstcase_matrix(fig2.scenarios)
    assert throughput_from_matrix(m) == Fraction(1, 41)
    lam, cyc = mcm(build_mpag(m))
    assert lam == 41 and cyc == [3, 4]


def test_partial_fsm_warns(fig2):
    sc = fig2.scenarios
    fsm = Fsm((("qa", "a"), ("qb", "b")), "qa", frozenset({("qa", "qb"), ("qb", "qb")}))
    with pytest.warns(ConservativeApproximationWarning):
        sadf_worstcase_matrix(ScenarioSet(sc.scenarios, fsm))
    only_a = Fsm((("qa", "a"), ("qb", "b")), "qa", frozenset({("qa", "qa")}))
    with pytest.warns(ConservativeApproximationWarning):
        m = sadf_worstcase_matrix(ScenarioSet(sc.scenarios, only_a))
    assert m == extract_numeric_matrix(sc.scenario("a"))


def test_deadlock_detected_during_simulation():
    g = parse_model(
        'sdf "d"\nactor A exec 1\nactor B exec 1\nchan A -> B rates 1 : 2\nchan B -> A rates 2 : 1 init 1'
    ).graph
    with pytest.raises(DeadlockError, match="not live"):
        extract_numeric_matrix(g)


@given(st.integers(0, 10_000))
def test_firing_order_does_not_matter(fig1, seed):
    g = fig1.graph
    assert extract_numeric_matrix(g, random.Random(seed)) == extract_numeric_matrix(g)


@given(st.fractions(min_value=Fraction(1, 9), max_value=9, max_denominator=9))
def test_scaling_execution_times(fig1, c):
    g = fig1.graph
    scaled = g.with_exec_times({a: TimeExpr.const(t.constant * c) for a, t in g.actors})
    base = extract_numeric_matrix(g)
    m = extract_numeric_matrix(scaled)
    for r0, r1 in zip(base.entries, m.entries):
        for x, y in zip(r0, r1):
            assert y == x * c if x != float("-inf") else y == x
    assert throughput_from_matrix(m) == throughput_from_matrix(base) / c


def scalar_run(g, iterations):
    """Plain timestamp simulation: every initial token is available at time 0."""
    from collections import deque

    from psadf.model import concrete_counts

    counts = {a: n * iterations for a, n in concrete_counts(g).items()}
    queues = [deque([Fraction(0)] * ch.initial_tokens) for ch in g.channels]
    exec_time = {a: t.constant for a, t in g.actors}
    while any(counts.values()):
        for a in sorted(counts):
            ins = [(i, ch) for i, ch in enumerate(g.channels) if ch.dst == a]
            while counts[a] and all(len(queues[i]) >= ch.consumption.coefficient for i, ch in ins):
                start = Fraction(0)
                for i, ch in ins:
                    for _ in range(ch.consumption.coefficient):
                        start = max(start, queues[i].popleft())
                for i, ch in enumerate(g.channels):
                    if ch.src == a:
                        queues[i].extend([start + exec_time[a]] * ch.production.coefficient)
                counts[a] -= 1
    return tuple(queues[t.channel][t.position - 1] for t in g.tokens)


@given(st.lists(st.integers(0, 40), min_size=5, max_size=5), st.integers(1, 4))
def test_matrix_governs_token_times(fig1, times, k):
    g = fig1.graph.with_exec_times({a: TimeExpr.const(t) for a, t in zip("ABCDE", times)})
    m = extract_numeric_matrix(g)
    assert evolve(m, [0] * 5, k) == scalar_run(g, k)
