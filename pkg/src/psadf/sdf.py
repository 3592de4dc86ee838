"""Numeric (max,+) characteristic matrices of concrete SDF graphs and SADF combination.

One iteration is simulated with tokens carrying a dependency vector over the
initial tokens instead of a scalar time, so a single pass yields every row of
the matrix.  Times are scaled to integers internally to keep the inner loop
in exact integer arithmetic.
"""

from __future__ import annotations

import random
import warnings
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .expr import lcm
from .maxplus import NEG_INF, MaxPlusMatrix, elementwise_max, mp_matvec
from .model import DeadlockError, ModelError, PsadfGraph, concrete_counts


class ConservativeApproximationWarning(UserWarning):
    pass


def _scaled_exec_times(g: PsadfGraph) -> tuple[dict[str, int], int]:
    scale = 1
    for a, t in g.actors:
        if not t.is_constant:
            raise ModelError(f"actor {a} has a parametric execution time; bind the graph first")
        scale = lcm(scale, t.constant.denominator)
    return {a: int(t.constant * scale) for a, t in g.actors}, scale


def simulate_iteration(g: PsadfGraph, rng: random.Random | None = None):
    """Run one iteration; return the per-channel token queues and the time scale.

    With ``rng`` the next firing is drawn at random among enabled actors,
    otherwise actors are visited round-robin in name order, each firing as
    often as it can.
    """
    counts = concrete_counts(g)
    exec_int, scale = _scaled_exec_times(g)
    n = len(g.labels)
    queues = [deque() for _ in g.channels]
    totals = [0] * len(g.channels)
    for slot_index, slot in enumerate(g.tokens):
        vec = [NEG_INF] * n
        vec[slot_index] = 0
        queues[slot.channel].append([tuple(vec), 1])
        totals[slot.channel] += 1
    inputs = {a: [] for a in g.actor_names}
    outputs = {a: [] for a in g.actor_names}
    for ci, ch in enumerate(g.channels):
        inputs[ch.dst].append((ci, ch.consumption.coefficient))
        outputs[ch.src].append((ci, ch.production.coefficient))
    remaining = dict(counts)
    empty = (NEG_INF,) * n

    def enabled(a):
        return remaining[a] > 0 and all(totals[ci] >= need for ci, need in inputs[a])

    def fire(a):
        vec = empty
        for ci, need in inputs[a]:
            dq = queues[ci]
            totals[ci] -= need
            while need:
                run = dq[0]
                take = run[1] if run[1] < need else need
                vec = tuple(map(max, vec, run[0]))
                run[1] -= take
                need -= take
                if not run[1]:
                    dq.popleft()
        e = exec_int[a]
        out = tuple(x + e for x in vec)
        for ci, prod in outputs[a]:
            queues[ci].append([out, prod])
            totals[ci] += prod
        remaining[a] -= 1

    names = sorted(g.actor_names)
    left = sum(remaining.values())
    while left:
        if rng is not None:
            ready = [a for a in names if enabled(a)]
            if not ready:
                raise DeadlockError("graph not live: no actor can fire")
            fire(rng.choice(ready))
            left -= 1
            continue
        progress = False
        for a in names:
            while enabled(a):
                fire(a)
                left -= 1
                progress = True
        if not progress:
            stuck = ", ".join(a for a in names if remaining[a])
            raise DeadlockError(f"graph not live: deadlock with pending firings of {stuck}")
    for ci, ch in enumerate(g.channels):
        if totals[ci] != ch.initial_tokens:
            raise ModelError(f"channel {ch} holds {totals[ci]} tokens after an iteration, expected {ch.initial_tokens}")
    return queues, scale


def extract_numeric_matrix(g: PsadfGraph, rng: random.Random | None = None) -> MaxPlusMatrix:
    queues, scale = simulate_iteration(g, rng)
    rows = []
    for slot in g.tokens:
        pos = slot.position
        for vec, count in queues[slot.channel]:
            if pos <= count:
                break
            pos -= count
        rows.append(tuple(x if x == NEG_INF else Fraction(x, scale) for x in vec))
    return MaxPlusMatrix(tuple(rows), g.labels)


@dataclass(frozen=True)
class Fsm:
    states: tuple[tuple[str, str], ...]  # (state, scenario)
    initial: str
    transitions: frozenset = field(default_factory=frozenset)

    def reachable(self) -> set[str]:
        seen, todo = {self.initial}, [self.initial]
        while todo:
            q = todo.pop()
            for a, b in self.transitions:
                if a == q and b not in seen:
                    seen.add(b)
                    todo.append(b)
        return seen


@dataclass(frozen=True)
class ScenarioSet:
    scenarios: tuple[tuple[str, PsadfGraph], ...]
    fsm: Fsm | None = None

    def scenario(self, name: str) -> PsadfGraph:
        return dict(self.scenarios)[name]


def sadf_worstcase_matrix(s: ScenarioSet) -> MaxPlusMatrix:
    """Elementwise maximum of the scenario matrices reachable in the FSM.

    Exact for a fully connected FSM with one state per scenario; for any other
    FSM the result is a conservative bound and a warning is issued.
    """
    if not s.scenarios:
        raise ValueError("empty scenario set")
    labels = s.scenarios[0][1].labels
    for name, g in s.scenarios:
        if g.labels != labels:
            raise ValueError(f"scenario {name}: token labels differ from the other scenarios")
    names = [name for name, _ in s.scenarios]
    used = names
    if s.fsm is not None:
        state_scen = dict(s.fsm.states)
        for q, sc in s.fsm.states:
            if sc not in names:
                raise ValueError(f"state {q} refers to unknown scenario {sc}")
        reach = s.fsm.reachable()
        used = sorted({state_scen[q] for q in reach}, key=names.index)
        states = [q for q, _ in s.fsm.states]
        full = set(s.fsm.transitions) == {(a, b) for a in states for b in states}
        one_each = sorted(state_scen.values()) == sorted(names)
        if not (full and one_each):
            warnings.warn(
                "scenario FSM is not fully connected with one state per scenario: "
                "result is a conservative over-approximation",
                ConservativeApproximationWarning,
                stacklevel=2,
            )
    return elementwise_max([extract_numeric_matrix(s.scenario(n)) for n in used])


def evolve(m: MaxPlusMatrix, gamma0: Sequence, k: int) -> tuple:
    if k < 0:
        raise ValueError("k must be nonnegative")
    if len(gamma0) != m.n:
        raise ValueError(f"vector of length {len(gamma0)} for {m.n}x{m.n} matrix")
    v = tuple(gamma0)
    for _ in range(k):
        v = mp_matvec(m, v)
    return v
