"""SDF / SADF / PSADF graph model: validation, balance equations, schedules, binding."""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Mapping

import networkx as nx

from .expr import LinearConstraint, RateExpr, TimeExpr, lcm


class ModelError(ValueError):
    """Ill-formed graph or parameter assignment."""


class AnalysisError(RuntimeError):
    """A well-formed model that the analysis cannot handle."""


class InconsistentGraphError(AnalysisError):
    pass


class DeadlockError(AnalysisError):
    pass


class UnsupportedRateStructure(AnalysisError):
    pass


class BoundsWarning(UserWarning):
    """A bound parameter point lies outside the declared parameter space."""


@dataclass(frozen=True)
class Channel:
    src: str
    dst: str
    production: RateExpr
    consumption: RateExpr
    initial_tokens: int = 0

    @property
    def is_self_loop(self) -> bool:
        return self.src == self.dst

    def __str__(self):
        return f"{self.src}->{self.dst}"


@dataclass(frozen=True)
class RateParam:
    name: str
    lo: int
    hi: int
    modifier: str | None = None
    period: RateExpr = RateExpr()


@dataclass(frozen=True)
class DurationParam:
    name: str
    lo: Fraction
    hi: Fraction
    integer: bool = False


@dataclass(frozen=True)
class TokenSlot:
    label: str
    channel: int
    position: int  # 1 = oldest


@dataclass(frozen=True)
class PsadfGraph:
    """A (parametric) dataflow graph.

    Plain SDF graphs are the special case without parameters.  ``aliases``
    are duration parameters defined as linear forms of the declared ones.
    """

    name: str
    actors: tuple[tuple[str, TimeExpr], ...]
    channels: tuple[Channel, ...]
    rate_params: tuple[RateParam, ...] = ()
    duration_params: tuple[DurationParam, ...] = ()
    aliases: tuple[tuple[str, TimeExpr], ...] = ()
    rate_constraints: tuple[LinearConstraint, ...] = ()
    duration_constraints: tuple[LinearConstraint, ...] = ()
    kind: str = "psadf"

    @cached_property
    def exec_times(self) -> dict[str, TimeExpr]:
        return dict(self.actors)

    @cached_property
    def actor_names(self) -> list[str]:
        return [a for a, _ in self.actors]

    @cached_property
    def rate_names(self) -> list[str]:
        return [p.name for p in self.rate_params]

    @cached_property
    def duration_names(self) -> list[str]:
        return [p.name for p in self.duration_params] + [a for a, _ in self.aliases]

    @cached_property
    def alias_map(self) -> dict[str, TimeExpr]:
        return dict(self.aliases)

    @property
    def is_parametric(self) -> bool:
        return bool(self.rate_params or self.duration_params)

    @cached_property
    def tokens(self) -> list[TokenSlot]:
        out, k = [], 0
        for ci, ch in enumerate(self.channels):
            for m in range(1, ch.initial_tokens + 1):
                k += 1
                out.append(TokenSlot(f"t{k}", ci, m))
        return out

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(t.label for t in self.tokens)

    def token_label(self, channel: int, position: int) -> str:
        for t in self.tokens:
            if t.channel == channel and t.position == position:
                return t.label
        raise KeyError((channel, position))

    def with_exec_times(self, overrides: Mapping[str, TimeExpr]) -> "PsadfGraph":
        acts = tuple((a, overrides.get(a, t)) for a, t in self.actors)
        return replace(self, actors=acts)


# ---------------------------------------------------------------- validation


def _structural_problems(g: PsadfGraph) -> list[str]:
    diags = []
    names = set(g.actor_names)
    if len(names) != len(g.actor_names):
        diags.append("duplicate actor names")
    rate_names = set(g.rate_names)
    dur_names = set(g.duration_names)
    for a, t in g.actors:
        for k in t.params - dur_names:
            diags.append(f"actor {a}: undeclared duration parameter {k}")
    for alias, t in g.aliases:
        if t.params & set(g.alias_map):
            diags.append(f"alias {alias} refers to another alias")
    for ch in g.channels:
        for end in (ch.src, ch.dst):
            if end not in names:
                diags.append(f"channel {ch}: unknown actor {end}")
        for r in (ch.production, ch.consumption):
            for k in r.params - rate_names:
                diags.append(f"channel {ch}: undeclared rate parameter {k}")
        if ch.initial_tokens < 0:
            diags.append(f"channel {ch}: negative initial tokens")
    for p in g.rate_params:
        if p.lo < 1 or p.lo > p.hi:
            diags.append(f"rate parameter {p.name}: bounds [{p.lo}, {p.hi}] must be positive and nonempty")
        if p.modifier is not None and p.modifier not in names:
            diags.append(f"rate parameter {p.name}: unknown modifier {p.modifier}")
        for k in p.period.params - rate_names:
            diags.append(f"rate parameter {p.name}: undeclared parameter {k} in period")
    for p in g.duration_params:
        if p.lo < 0 or p.lo > p.hi:
            diags.append(f"duration parameter {p.name}: bounds [{p.lo}, {p.hi}] must be nonnegative and nonempty")
    for c in g.rate_constraints:
        for k in c.params - rate_names:
            diags.append(f"rate constraint {c}: unknown parameter {k}")
    for c in g.duration_constraints:
        for k in c.params - dur_names:
            diags.append(f"duration constraint {c}: unknown parameter {k}")
    if not g.labels:
        diags.append("graph has no initial tokens")
    und = nx.Graph()
    und.add_nodes_from(names)
    und.add_edges_from((ch.src, ch.dst) for ch in g.channels if ch.src in names and ch.dst in names)
    if names and not nx.is_connected(und):
        diags.append("graph is not connected")
    return diags


def validate(g: PsadfGraph) -> list[str]:
    """Return diagnostics; an empty list means the graph is analysable."""
    diags = _structural_problems(g)
    if diags:
        return diags
    for ch in g.channels:
        if ch.is_self_loop:
            if ch.production != ch.consumption:
                diags.append(f"self-loop {ch}: production {ch.production} differs from consumption {ch.consumption}")
            elif not ch.consumption.is_constant or ch.initial_tokens != ch.consumption.coefficient:
                diags.append(
                    f"self-loop {ch}: initial tokens {ch.initial_tokens} must equal the consumption rate {ch.consumption}"
                )
    try:
        rv = repetition_vector(g)
    except AnalysisError as exc:
        diags.append(str(exc))
        rv = None
    if rv is not None:
        for p in g.rate_params:
            if p.modifier is None:
                continue
            ratio = rv[p.modifier].divide(p.period)
            if ratio is None or ratio != RateExpr(1):
                diags.append(
                    f"rate parameter {p.name}: modifier {p.modifier} fires {rv[p.modifier]} times per "
                    f"iteration but changes it every {p.period}; it must change only between iterations"
                )
    dag = nx.DiGraph()
    dag.add_nodes_from(g.actor_names)
    removed = []
    for ch in g.channels:
        if ch.is_self_loop:
            continue
        if ch.initial_tokens > 0:
            removed.append(ch)
        else:
            dag.add_edge(ch.src, ch.dst)
    if not nx.is_directed_acyclic_graph(dag):
        cyc = nx.find_cycle(dag)
        diags.append(f"deadlocked cycle without initial tokens: {' -> '.join(u for u, _ in cyc)}")
    else:
        for ch in removed:
            if dag.out_degree(ch.src) > 0:
                diags.append(f"channel {ch} with initial tokens: producer {ch.src} is not a sink of the acyclic part")
            if dag.in_degree(ch.dst) > 0:
                diags.append(f"channel {ch} with initial tokens: consumer {ch.dst} is not a source of the acyclic part")
            if rv is not None:
                need = ch.consumption * rv[ch.dst]
                if not need.is_constant or need.coefficient > ch.initial_tokens:
                    diags.append(
                        f"channel {ch}: {ch.initial_tokens} initial tokens do not cover one iteration "
                        f"of {ch.dst} (needs {need})"
                    )
    return diags


# ---------------------------------------------------------- balance equations


@dataclass(frozen=True)
class _Ratio:
    """Laurent monomial with rational coefficient, used while solving balance equations."""

    coeff: Fraction
    exps: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, r: RateExpr):
        return cls(Fraction(r.coefficient), r.factors)

    def mul(self, other: "_Ratio", sign=1) -> "_Ratio":
        e = dict(self.exps)
        for k, x in other.exps:
            e[k] = e.get(k, 0) + sign * x
        c = self.coeff * other.coeff if sign == 1 else self.coeff / other.coeff
        return _Ratio(c, tuple(sorted((k, x) for k, x in e.items() if x)))


RepetitionVector = dict  # actor -> RateExpr


def repetition_vector(g: PsadfGraph) -> dict[str, RateExpr]:
    """Minimal monomial solution of the balance equations."""
    names = g.actor_names
    if not names:
        raise InconsistentGraphError("graph not consistent: no actors")
    adj: dict[str, list] = {a: [] for a in names}
    for ch in g.channels:
        adj[ch.src].append((ch.dst, _Ratio.of(ch.production), _Ratio.of(ch.consumption)))
        adj[ch.dst].append((ch.src, _Ratio.of(ch.consumption), _Ratio.of(ch.production)))
    sol = {names[0]: _Ratio(Fraction(1))}
    queue = deque([names[0]])
    while queue:
        u = queue.popleft()
        for v, out_rate, in_rate in adj[u]:
            # count(u) * out_rate = count(v) * in_rate
            if v not in sol:
                sol[v] = sol[u].mul(out_rate).mul(in_rate, -1)
                queue.append(v)
    if len(sol) != len(names):
        raise InconsistentGraphError("graph not consistent: disconnected actors")
    for ch in g.channels:
        lhs = sol[ch.src].mul(_Ratio.of(ch.production))
        rhs = sol[ch.dst].mul(_Ratio.of(ch.consumption))
        if lhs != rhs:
            raise InconsistentGraphError(f"graph not consistent: balance fails on channel {ch}")
    params = sorted({k for r in sol.values() for k, _ in r.exps})
    shift = {k: -min(dict(r.exps).get(k, 0) for r in sol.values()) for k in params}
    den = 1
    for r in sol.values():
        den = lcm(den, r.coeff.denominator)
    out = {}
    for a in names:
        r = sol[a]
        e = dict(r.exps)
        facs = tuple((k, e.get(k, 0) + shift[k]) for k in params)
        out[a] = [int(r.coeff * den), facs]
    g_all = 0
    for c, _ in out.values():
        g_all = gcd(g_all, c)
    result = {a: RateExpr(c // g_all, facs) for a, (c, facs) in out.items()}
    const_gcd = 0
    for r in result.values():
        if r.is_constant:
            const_gcd = gcd(const_gcd, r.coefficient)
    if const_gcd != 1:
        raise UnsupportedRateStructure(
            "unsupported rate structure: the minimal repetition vector is not a monomial in the rate parameters"
        )
    return result


# -------------------------------------------------------------- scheduling


def dag_decompose(g: PsadfGraph) -> tuple[list[tuple[str, str]], list[Channel]]:
    """Split channels into the token-free acyclic part and the removed channels."""
    dag = nx.DiGraph()
    dag.add_nodes_from(g.actor_names)
    removed = []
    for ch in g.channels:
        if ch.is_self_loop or ch.initial_tokens > 0:
            if ch.is_self_loop and ch.initial_tokens == 0:
                raise DeadlockError(f"deadlocked cycle: self-loop on {ch.src} without initial tokens")
            removed.append(ch)
        else:
            dag.add_edge(ch.src, ch.dst)
    if not nx.is_directed_acyclic_graph(dag):
        cyc = nx.find_cycle(dag)
        raise DeadlockError(f"deadlocked cycle: {' -> '.join(u for u, _ in cyc)} has no initial tokens")
    edges = [(ch.src, ch.dst) for ch in g.channels if not (ch.is_self_loop or ch.initial_tokens > 0)]
    return edges, removed


@dataclass(frozen=True)
class QuasiStaticSchedule:
    entries: tuple[tuple[str, RateExpr], ...]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __str__(self):
        parts = []
        for a, r in self.entries:
            if r == RateExpr(1):
                parts.append(a)
            else:
                s = str(r)
                parts.append(f"{a}^{s}" if len(s) == 1 else f"{a}^{{{s}}}")
        return "".join(parts)


def quasi_static_schedule(g: PsadfGraph) -> QuasiStaticSchedule:
    edges, _ = dag_decompose(g)
    rv = repetition_vector(g)
    dag = nx.DiGraph()
    dag.add_nodes_from(g.actor_names)
    dag.add_edges_from(edges)
    order = list(nx.lexicographical_topological_sort(dag, key=str))
    return QuasiStaticSchedule(tuple((a, rv[a]) for a in order))


# ------------------------------------------------------------------ binding


def complete_point(g_or_aliases, point: Mapping) -> dict:
    """Add alias durations to a point (checking consistency when given)."""
    aliases = g_or_aliases.alias_map if isinstance(g_or_aliases, PsadfGraph) else dict(g_or_aliases)
    out = dict(point)
    for name, t in aliases.items():
        val = t.evaluate(out)
        if name in point and Fraction(point[name]) != val:
            raise ModelError(f"{name}={point[name]} contradicts its definition {t} = {val}")
        out[name] = val
    return out


def check_point(g: PsadfGraph, point: Mapping) -> dict:
    """Type-check a full parameter assignment; returns it normalized."""
    out = {}
    for p in g.rate_params:
        if p.name not in point:
            raise ModelError(f"missing value for rate parameter {p.name}")
        v = Fraction(point[p.name])
        if v.denominator != 1 or v < 1:
            raise ModelError(f"rate parameter {p.name} must be a positive integer, got {point[p.name]}")
        out[p.name] = int(v)
    for p in g.duration_params:
        if p.name not in point:
            raise ModelError(f"missing value for duration parameter {p.name}")
        v = Fraction(point[p.name])
        if v < 0:
            raise ModelError(f"duration parameter {p.name} must be nonnegative")
        if p.integer and v.denominator != 1:
            raise ModelError(f"duration parameter {p.name} is declared integer, got {v}")
        out[p.name] = v
    for name in g.alias_map:
        if name in point:
            out[name] = Fraction(point[name])
    known = set(g.rate_names) | set(g.duration_names)
    extra = set(point) - known
    if extra:
        raise ModelError(f"unknown parameters: {', '.join(sorted(extra))}")
    return complete_point(g, out)


def out_of_bounds(g: PsadfGraph, point: Mapping) -> list[str]:
    msgs = []
    for p in g.rate_params:
        if not p.lo <= point[p.name] <= p.hi:
            msgs.append(f"{p.name}={point[p.name]} outside [{p.lo}, {p.hi}]")
    for p in g.duration_params:
        if not p.lo <= point[p.name] <= p.hi:
            msgs.append(f"{p.name}={point[p.name]} outside [{p.lo}, {p.hi}]")
    for c in g.rate_constraints + g.duration_constraints:
        if not c.satisfied(point):
            msgs.append(f"constraint {c} violated")
    return msgs


def bind(g: PsadfGraph, point: Mapping) -> PsadfGraph:
    """Evaluate all rates and execution times at a parameter point."""
    pt = check_point(g, point)
    for msg in out_of_bounds(g, pt):
        warnings.warn(f"point outside the parameter space: {msg}", BoundsWarning, stacklevel=2)
    actors = tuple((a, TimeExpr.const(t.evaluate(pt))) for a, t in g.actors)
    channels = tuple(
        Channel(ch.src, ch.dst, RateExpr(ch.production.evaluate(pt)), RateExpr(ch.consumption.evaluate(pt)), ch.initial_tokens)
        for ch in g.channels
    )
    return PsadfGraph(g.name, actors, channels, kind="sdf")


def concrete_counts(g: PsadfGraph) -> dict[str, int]:
    rv = repetition_vector(g)
    if any(not r.is_constant for r in rv.values()):
        raise ModelError("graph has parametric rates; bind it to a point first")
    return {a: r.coefficient for a, r in rv.items()}
