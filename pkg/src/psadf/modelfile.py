"""Line-oriented text format for SDF, SADF and PSADF models.

::

    psadf "example"
    rateparam p in [10, 2000] modifier A every 1
    timeparam ci in [1, 5] continuous
    timeparam a = 30*ci
    actor A exec a
    chan A -> B rates p : 1 init 0
    constraint p + s <= 1400

SADF files add ``scenario <name>`` blocks of ``actor <id> exec <const>``
overrides and an optional ``fsm`` block (``state``, ``initial``, ``trans``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .expr import LinearConstraint, RateExpr, TimeExpr
from .model import Channel, DurationParam, PsadfGraph, RateParam
from .polynomial import parse_polynomial
from .sdf import Fsm, ScenarioSet

KINDS = ("sdf", "sadf", "psadf")


class ModelParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Model:
    kind: str
    name: str
    graph: PsadfGraph
    scenarios: ScenarioSet | None = None


_NUM = r"-?\d+(?:/\d+)?"
_ID = r"[A-Za-z_][A-Za-z_0-9]*"
_HEADER = re.compile(rf'^({"|".join(KINDS)})\s+"([^"]*)"$')
_RATEPARAM = re.compile(
    rf"^rateparam\s+({_ID})\s+in\s+\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\](?:\s+modifier\s+({_ID})(?:\s+every\s+(.+))?)?$"
)
_TIMEPARAM = re.compile(rf"^timeparam\s+({_ID})\s+in\s+\[\s*({_NUM})\s*,\s*({_NUM})\s*\]\s*(continuous|integer)?$")
_ALIAS = re.compile(rf"^timeparam\s+({_ID})\s*=\s*(.+)$")
_ACTOR = re.compile(rf"^actor\s+({_ID})\s+exec\s+(.+)$")
_CHAN = re.compile(rf"^chan\s+({_ID})\s*->\s*({_ID})\s+rates\s+(.+?)\s*:\s*(.+?)(?:\s+init\s+(\d+))?$")
_CONSTRAINT = re.compile(r"^constraint\s+(.+?)\s*(<=|>=)\s*(.+)$")
_SCENARIO = re.compile(rf"^scenario\s+({_ID})$")
_STATE = re.compile(rf"^state\s+({_ID})\s+scenario\s+({_ID})$")
_INITIAL = re.compile(rf"^initial\s+({_ID})$")
_TRANS = re.compile(rf"^trans\s+({_ID})\s*->\s*({_ID})$")


def _rate(text: str, line: int) -> RateExpr:
    try:
        poly = parse_polynomial(text, ())
    except ValueError as exc:
        raise ModelParseError(line, f"bad rate expression {text!r}: {exc}") from None
    if not poly.terms:
        raise ModelParseError(line, f"rate {text!r} must be positive")
    if len(poly.terms) != 1:
        raise ModelParseError(line, f"rate {text!r} must be a single product")
    (dur, rates), c = poly.terms[0]
    if c.denominator != 1 or c < 1:
        raise ModelParseError(line, f"rate {text!r} needs a positive integer coefficient")
    return RateExpr(int(c), rates)


def _time(text: str, durations, line: int) -> TimeExpr:
    try:
        poly = parse_polynomial(text, durations)
    except ValueError as exc:
        raise ModelParseError(line, f"bad execution time {text!r}: {exc}") from None
    terms, const = [], Fraction(0)
    for (dur, rates), c in poly.terms:
        if rates:
            names = ", ".join(r for r, _ in rates)
            raise ModelParseError(line, f"execution time {text!r} uses undeclared duration parameters: {names}")
        if c < 0:
            raise ModelParseError(line, f"execution time {text!r} has a negative coefficient")
        if dur:
            terms.append((dur, c))
        else:
            const += c
    return TimeExpr(tuple(terms), const)


def _linear(lhs: str, op: str, rhs: str, rate_names, dur_names, line: int):
    try:
        poly = parse_polynomial(lhs, dur_names) - parse_polynomial(rhs, dur_names)
    except ValueError as exc:
        raise ModelParseError(line, f"bad constraint: {exc}") from None
    if op == ">=":
        poly = -poly
    coeffs, const = [], Fraction(0)
    for (dur, rates), c in poly.terms:
        degree = sum(e for _, e in rates) + (1 if dur else 0)
        if degree > 1:
            raise ModelParseError(line, "constraint is not linear")
        if degree == 0:
            const += c
        else:
            coeffs.append((dur or rates[0][0], c))
    names = {k for k, _ in coeffs}
    is_rate = names <= set(rate_names)
    is_dur = names <= set(dur_names)
    unknown = names - set(rate_names) - set(dur_names)
    if unknown:
        raise ModelParseError(line, f"unknown parameters {sorted(unknown)} in constraint")
    if not names:
        raise ModelParseError(line, "constraint has no parameters")
    if not (is_rate or is_dur):
        raise ModelParseError(line, "constraint mixes rate and duration parameters")
    return LinearConstraint(tuple(coeffs), -const), is_rate


def parse_model(text: str) -> Model:
    kind = name = None
    actors: dict[str, TimeExpr] = {}
    channels, rate_params, dur_params, aliases = [], [], [], {}
    rate_cons, dur_cons = [], []
    scenarios: dict[str, dict] = {}
    current_scenario = None
    in_fsm = False
    states, initial, trans = [], None, set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if kind is None:
            m = _HEADER.match(line)
            if not m:
                raise ModelParseError(lineno, 'expected header: sdf|sadf|psadf "<name>"')
            kind, name = m.groups()
            continue
        dur_names = [p.name for p in dur_params] + list(aliases)
        if m := _SCENARIO.match(line):
            if kind != "sadf":
                raise ModelParseError(lineno, "scenario blocks are only allowed in sadf models")
            current_scenario, in_fsm = m.group(1), False
            if current_scenario in scenarios:
                raise ModelParseError(lineno, f"duplicate scenario {current_scenario}")
            scenarios[current_scenario] = {}
            continue
        if line == "fsm":
            if kind != "sadf":
                raise ModelParseError(lineno, "fsm block is only allowed in sadf models")
            current_scenario, in_fsm = None, True
            continue
        if in_fsm:
            if m := _STATE.match(line):
                states.append(m.groups())
            elif m := _INITIAL.match(line):
                initial = m.group(1)
            elif m := _TRANS.match(line):
                trans.add(m.groups())
            else:
                raise ModelParseError(lineno, f"unexpected line in fsm block: {line!r}")
            continue
        if m := _ACTOR.match(line):
            actor, exec_text = m.groups()
            t = _time(exec_text, dur_names, lineno)
            if current_scenario is not None:
                if not t.is_constant:
                    raise ModelParseError(lineno, "scenario execution times must be constants")
                scenarios[current_scenario][actor] = t
            else:
                if actor in actors:
                    raise ModelParseError(lineno, f"duplicate actor {actor}")
                actors[actor] = t
            continue
        if current_scenario is not None:
            raise ModelParseError(lineno, f"only actor overrides are allowed in a scenario block: {line!r}")
        if m := _RATEPARAM.match(line):
            if kind != "psadf":
                raise ModelParseError(lineno, "parameters are only allowed in psadf models")
            pname, lo, hi, mod, every = m.groups()
            period = _rate(every, lineno) if every else RateExpr(1)
            rate_params.append(RateParam(pname, int(lo), int(hi), mod, period))
            continue
        if m := _TIMEPARAM.match(line):
            if kind != "psadf":
                raise ModelParseError(lineno, "parameters are only allowed in psadf models")
            pname, lo, hi, flag = m.groups()
            dur_params.append(DurationParam(pname, Fraction(lo), Fraction(hi), flag == "integer"))
            continue
        if m := _ALIAS.match(line):
            if kind != "psadf":
                raise ModelParseError(lineno, "parameters are only allowed in psadf models")
            pname, expr = m.groups()
            aliases[pname] = _time(expr, [p.name for p in dur_params], lineno)
            continue
        if m := _CHAN.match(line):
            src, dst, prod, cons, init = m.groups()
            channels.append(Channel(src, dst, _rate(prod, lineno), _rate(cons, lineno), int(init or 0)))
            continue
        if m := _CONSTRAINT.match(line):
            if kind != "psadf":
                raise ModelParseError(lineno, "constraints are only allowed in psadf models")
            c, is_rate = _linear(*m.groups(), [p.name for p in rate_params], dur_names, lineno)
            (rate_cons if is_rate else dur_cons).append(c)
            continue
        raise ModelParseError(lineno, f"unrecognized declaration: {line!r}")
    if kind is None:
        raise ModelParseError(1, "empty model file")
    if not actors:
        raise ModelParseError(1, "model declares no actors")
    graph = PsadfGraph(
        name,
        tuple(actors.items()),
        tuple(channels),
        tuple(rate_params),
        tuple(dur_params),
        tuple(aliases.items()),
        tuple(rate_cons),
        tuple(dur_cons),
        kind,
    )
    scen = None
    if kind == "sadf":
        if not scenarios:
            scenarios = {"default": {}}
        for sname, over in scenarios.items():
            unknown = set(over) - set(actors)
            if unknown:
                raise ModelParseError(1, f"scenario {sname} overrides unknown actors {sorted(unknown)}")
        fsm = None
        if states or initial or trans:
            if initial is None:
                raise ModelParseError(1, "fsm block without an initial state")
            fsm = Fsm(tuple(states), initial, frozenset(trans))
        scen = ScenarioSet(tuple((s, graph.with_exec_times(over)) for s, over in scenarios.items()), fsm)
    return Model(kind, name, graph, scen)


def load_model(path) -> Model:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def format_model(model: Model) -> str:
    g = model.graph
    lines = [f'{model.kind} "{model.name}"']
    for p in g.rate_params:
        s = f"rateparam {p.name} in [{p.lo}, {p.hi}]"
        if p.modifier:
            s += f" modifier {p.modifier} every {p.period}"
        lines.append(s)
    for p in g.duration_params:
        lines.append(f"timeparam {p.name} in [{p.lo}, {p.hi}] {'integer' if p.integer else 'continuous'}")
    for a, t in g.aliases:
        lines.append(f"timeparam {a} = {t}")
    for a, t in g.actors:
        lines.append(f"actor {a} exec {t}")
    for ch in g.channels:
        lines.append(f"chan {ch.src} -> {ch.dst} rates {ch.production} : {ch.consumption} init {ch.initial_tokens}")
    for c in g.rate_constraints + g.duration_constraints:
        lines.append(f"constraint {c}")
    if model.scenarios is not None:
        base = g.exec_times
        for sname, sg in model.scenarios.scenarios:
            lines.append(f"scenario {sname}")
            for a, t in sg.actors:
                if t != base[a]:
                    lines.append(f"actor {a} exec {t}")
        fsm = model.scenarios.fsm
        if fsm is not None:
            lines.append("fsm")
            for q, sc in fsm.states:
                lines.append(f"state {q} scenario {sc}")
            lines.append(f"initial {fsm.initial}")
            for a, b in sorted(fsm.transitions):
                lines.append(f"trans {a} -> {b}")
    return "\n".join(lines) + "\n"
