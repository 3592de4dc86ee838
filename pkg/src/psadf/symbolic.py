"""Symbolic (max,+) characteristic matrices of parametric dataflow graphs.

Actors are solved one after another in quasi-static schedule order.  The
completion time of firing ``k`` of an actor is kept as a *gamma function*:
a symbolic weight per initial token.  Firing indices are either concrete
(the actor's count is a plain integer, every firing is tabulated) or the
free index ``κ``, which then appears as a rate factor in the polynomials.

Whenever a weight ends up with two or more polynomials that are not ordered
on the current region (a conflict) the region is split into closed
subregions, one per candidate maximum, and extraction continues separately
in each feasible one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .expr import RateExpr
from .maxplus import NEG_INF, MaxPlusMatrix
from .model import AnalysisError, PsadfGraph, QuasiStaticSchedule, quasi_static_schedule, repetition_vector
from .optimize import dominates, feasible
from .polynomial import W_NEG_INF, Polynomial, _prune_syntactic, w_oplus, w_otimes, w_unit, weight_str
from .region import ConflictConstraint, Region

KAPPA = "κ"
KAPPA_RATE = RateExpr.param(KAPPA)


class UnsupportedPatternError(AnalysisError):
    pass


class RegionError(ValueError):
    pass


# ------------------------------------------------------------------ indices


@dataclass(frozen=True)
class IndexExpr:
    """``ceil((mono + offset) / den)``; simplified when ``den`` is 1.

    ``mono`` is None for a plain integer.
    """

    mono: RateExpr | None
    offset: int = 0
    den: RateExpr = RateExpr(1)

    @property
    def is_simplified(self) -> bool:
        return self.den == RateExpr(1)

    @property
    def is_concrete(self) -> bool:
        return self.is_simplified and (self.mono is None or self.mono.is_constant)

    @property
    def value(self) -> int:
        if not self.is_concrete:
            raise ValueError(f"index {self} is symbolic")
        return (self.mono.coefficient if self.mono else 0) + self.offset

    def at(self, kappa: int) -> "IndexExpr":
        if self.mono is None or KAPPA not in self.mono.params:
            return self
        e = dict(self.mono.factors)[KAPPA]
        rest = RateExpr(self.mono.coefficient * kappa**e, tuple((k, x) for k, x in self.mono.factors if k != KAPPA))
        return index_expr(rest, 1, -self.offset, self.den)

    def __str__(self):
        if self.mono is None:
            inner = str(self.offset)
        else:
            inner = str(self.mono)
            if self.offset:
                inner += f"{self.offset:+d}"
        if self.is_simplified:
            return inner
        return f"ceil(({inner})/{self.den})" if self.offset else f"ceil({inner}/{self.den})"


def index_expr(consumption: RateExpr, firing, init: int, production: RateExpr, lower=None) -> IndexExpr:
    """Index of the producer firing that wrote the last token read by a consumer firing.

    Results ``<= 0`` are pseudo-firings naming initial tokens: ``0`` is the
    newest initial token, ``-1`` the one before it, and so on.  ``lower``
    optionally maps a rate monomial to its minimum over the region.
    """
    if isinstance(firing, int):
        num = consumption * firing if firing > 0 else None
    else:
        num = consumption * firing
    if num is None:
        return IndexExpr(None, -init if production == RateExpr(1) else -(init // production.coefficient))
    if production == RateExpr(1):
        if num.is_constant:
            return IndexExpr(None, num.coefficient - init)
        return IndexExpr(num, -init)
    if num.is_constant and production.is_constant:
        return IndexExpr(None, -((init - num.coefficient) // production.coefficient))
    q = num.divide(production)
    if q is not None:
        if production.is_constant:
            off = -(init // production.coefficient)
        elif init == 0 or (lower is not None and lower(production) > init):
            off = 0
        else:
            return IndexExpr(num, -init, production)
        if q.is_constant:
            return IndexExpr(None, q.coefficient + off)
        return IndexExpr(q, off)
    return IndexExpr(num, -init, production)


# ------------------------------------------------------------ gamma functions

Gf = dict  # label -> weight


def _subst_kappa(p: Polynomial, mono: RateExpr) -> Polynomial:
    out = []
    for (dur, rates), c in p.terms:
        r = dict(rates)
        e = r.pop(KAPPA, 0)
        coef = c
        for _ in range(e):
            coef *= mono.coefficient
            for k, x in mono.factors:
                r[k] = r.get(k, 0) + x
        out.append(((dur, tuple(r.items())), coef))
    return Polynomial(tuple(out))


def _has_kappa(w) -> bool:
    return any(KAPPA in p.rate_params for p in w)


def _gf_oplus(a: Gf, b: Gf) -> Gf:
    out = dict(a)
    for k, w in b.items():
        out[k] = w_oplus(out.get(k, W_NEG_INF), w)
    return out


def _gf_otimes(a: Gf, p: Polynomial) -> Gf:
    return {k: w_otimes(w, p) for k, w in a.items()}


def _gf_freeze(a: Gf, labels) -> tuple:
    return tuple((t, a.get(t, W_NEG_INF)) for t in labels)


@dataclass(frozen=True)
class GammaFunction:
    """Completion times of the firings ``1..count`` of one actor.

    ``shape`` is ``table`` (one weight vector per concrete firing),
    ``constant`` (the same vector for every firing) or ``accumulating``
    (polynomials grow linearly with the firing index ``κ``).
    """

    actor: str
    count: RateExpr
    shape: str
    weights: tuple = ()
    table: tuple = ()

    def at(self, idx: IndexExpr) -> Gf:
        if self.shape == "table":
            if idx.is_concrete and 1 <= idx.value <= len(self.table):
                return dict(self.table[idx.value - 1])
            if len(self.table) == 1:
                return dict(self.table[0])
            raise UnsupportedPatternError(
                f"unsupported pattern: firing {idx} of {self.actor} cannot be selected from its {len(self.table)} concrete firings"
            )
        if self.shape == "constant":
            return dict(self.weights)
        if idx.is_concrete:
            if idx.value < 1:
                raise UnsupportedPatternError(f"unsupported pattern: firing {idx} of {self.actor} is not a real firing")
            mono = RateExpr(idx.value)
        elif idx.is_simplified and idx.offset == 0:
            mono = idx.mono
        else:
            raise UnsupportedPatternError(
                f"unsupported pattern: index {idx} of the accumulating solution of {self.actor} does not simplify"
            )
        return {t: frozenset(_subst_kappa(p, mono) for p in w) for t, w in self.weights}

    def final(self) -> Gf:
        if self.shape == "table":
            return dict(self.table[-1])
        return self.at(IndexExpr(self.count) if not self.count.is_constant else IndexExpr(None, self.count.coefficient))

    def __str__(self):
        def row(items):
            return " ⊕ ".join(f"({weight_str(w)}){t}" for t, w in items if w) or "-inf"

        if self.shape == "table":
            return "; ".join(f"γ({self.actor},{k}) = {row(r)}" for k, r in enumerate(self.table, 1))
        return f"γ({self.actor},κ) = {row(self.weights)}  for κ in [1, {self.count}]"


class _Ctx:
    """Region-dependent helpers shared by one extraction branch."""

    def __init__(self, g: PsadfGraph, region: Region, cache: dict):
        self.g = g
        self.region = region
        self.cache = cache
        self.bounds = {n: (lo, hi) for n, lo, hi in region.rate_bounds}

    def lower(self, r: RateExpr) -> int:
        v = r.coefficient
        for k, e in r.factors:
            v *= self.bounds[k][0] ** e if k in self.bounds else 1
        return v

    def upper(self, r: RateExpr) -> int:
        v = r.coefficient
        for k, e in r.factors:
            if k not in self.bounds:
                raise UnsupportedPatternError(f"unsupported pattern: unbounded index {r}")
            v *= self.bounds[k][1] ** e
        return v

    def normalize(self, w: frozenset) -> frozenset:
        w = _prune_syntactic(w)
        if len(w) < 2 or _has_kappa(w):
            return w
        key = (w, self.region)
        if key in self.cache:
            return self.cache[key]
        keep: list[Polynomial] = []
        for p in sorted(w):
            if any(dominates(q, p, self.region) for q in keep):
                continue
            keep = [q for q in keep if not dominates(p, q, self.region)]
            keep.append(p)
        out = frozenset(keep)
        self.cache[key] = out
        return out

    def normalize_gf(self, gf: Gf) -> Gf:
        return {t: self.normalize(w) for t, w in gf.items()}


def _consume(ctx: _Ctx, ch_index: int, firing, env: Mapping, partial=None) -> Gf:
    """Weights of the tokens read on one input channel by a consumer firing."""
    g = ctx.g
    ch = g.channels[ch_index]
    cons, prod, init = ch.consumption, ch.production, ch.initial_tokens
    producer = ch.src

    def producer_at(idx: IndexExpr) -> Gf:
        if partial is not None and producer == ch.dst:
            return dict(partial[idx.value - 1])
        if producer not in env:
            raise UnsupportedPatternError(
                f"unsupported pattern: {ch.dst} reads tokens of {producer}, which is scheduled later"
            )
        return env[producer].at(idx)

    out: Gf = {}
    if isinstance(firing, int) and cons.is_constant:
        lo, hi = cons.coefficient * (firing - 1) + 1, cons.coefficient * firing
        fired = set()
        for x in range(lo, hi + 1):
            if x <= init:
                out = _gf_oplus(out, {g.token_label(ch_index, x): w_unit()})
                continue
            if prod.is_constant:
                fired.add(-((init - x) // prod.coefficient))
            elif ctx.lower(prod) >= x - init:
                fired.add(1)
            else:
                raise UnsupportedPatternError(f"unsupported pattern: cannot resolve token {x} on channel {ch}")
        for f in sorted(fired):
            out = _gf_oplus(out, producer_at(IndexExpr(None, f)))
        return out
    if init:
        raise UnsupportedPatternError(
            f"unsupported pattern: symbolic consumption of initial tokens on channel {ch}"
        )
    idx = index_expr(cons, firing, 0, prod, ctx.lower)
    return producer_at(idx)


def solve_actor(g: PsadfGraph, env: Mapping, actor: str, count: RateExpr, region: Region | None = None, cache=None) -> GammaFunction:
    """Solve the completion-time recurrence of ``actor`` for all its firings in one iteration."""
    ctx = _Ctx(g, region or Region.from_graph(g), {} if cache is None else cache)
    return _solve(ctx, env, actor, count)


def _solve(ctx: _Ctx, env: Mapping, actor: str, count: RateExpr) -> GammaFunction:
    g = ctx.g
    e_poly = Polynomial.from_time(g.exec_times[actor])
    inputs = [i for i, ch in enumerate(g.channels) if ch.dst == actor]
    self_loops = [i for i in inputs if g.channels[i].is_self_loop]
    others = [i for i in inputs if i not in self_loops]
    if count.is_constant:
        table: list = []
        for k in range(1, count.coefficient + 1):
            acc: Gf = {}
            for ci in inputs:
                acc = _gf_oplus(acc, _consume(ctx, ci, k, env, table))
            table.append(_gf_freeze(ctx.normalize_gf(_gf_otimes(acc, e_poly)), g.labels))
        return GammaFunction(actor, count, "table", table=tuple(table))
    acc = {}
    for ci in others:
        acc = _gf_oplus(acc, _consume(ctx, ci, KAPPA_RATE, env))
    if self_loops:
        for ci in self_loops:
            ch = g.channels[ci]
            if ch.consumption != RateExpr(1) or ch.production != RateExpr(1) or ch.initial_tokens != 1:
                raise UnsupportedPatternError(
                    f"unsupported pattern: self-loop on {actor} with a parametric firing count "
                    "needs unit rates and exactly one initial token"
                )
        if any(_has_kappa(w) for w in acc.values()):
            raise UnsupportedPatternError(
                f"unsupported pattern: self-loop actor {actor} has inputs that depend on the firing index"
            )
        for ci in self_loops:
            acc = _gf_oplus(acc, {g.token_label(ci, 1): w_unit()})
        step = e_poly.scale(KAPPA_RATE)
    else:
        step = e_poly
    weights = _gf_freeze(ctx.normalize_gf(_gf_otimes(acc, step)), g.labels)
    shape = "accumulating" if any(_has_kappa(w) for _, w in weights) else "constant"
    return GammaFunction(actor, count, shape, weights=weights)


def detect_conflicts(gf: GammaFunction | Mapping, region: Region | None = None, cache=None) -> list:
    """``(label, polynomials)`` for every weight that keeps two or more polynomials."""
    weights = gf.final() if isinstance(gf, GammaFunction) else dict(gf)
    out = []
    for t, w in sorted(weights.items(), key=lambda kv: _label_key(kv[0])):
        if region is not None:
            w = _Ctx(None, region, {} if cache is None else cache).normalize(w)
        else:
            w = _prune_syntactic(w)
        if len(w) >= 2:
            out.append((t, sorted(w)))
    return out


def _label_key(t: str):
    return (len(t), t)


# ---------------------------------------------------------------- extraction


@dataclass(frozen=True)
class SymbolicMatrix:
    entries: tuple[tuple[Polynomial | None, ...], ...]
    region: Region
    labels: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def __str__(self):
        cells = [["-inf" if p is None else str(p) for p in row] for row in self.entries]
        width = max((len(c) for row in cells for c in row), default=1)
        return "\n".join("[ " + "  ".join(c.rjust(width) for c in row) + " ]" for row in cells)


class _Conflict(Exception):
    def __init__(self, where: str, label: str, polys):
        self.where, self.label, self.polys = where, label, polys


def _check(ctx: _Ctx, gf: Gf, where: str):
    for t in ctx.g.labels:
        w = gf.get(t, W_NEG_INF)
        if len(w) >= 2 and not _has_kappa(w):
            raise _Conflict(where, t, sorted(w))


def _assemble(ctx: _Ctx, env: Mapping, counts: Mapping) -> SymbolicMatrix:
    g = ctx.g
    rows = []
    for slot in g.tokens:
        ch = g.channels[slot.channel]
        m, init, prod = slot.position, ch.initial_tokens, ch.production
        produced = prod * counts[ch.src]
        if produced.is_constant:
            x = produced.coefficient + m
            if x <= init:
                gf = {g.token_label(slot.channel, x): w_unit()}
            else:
                f = -((init - x) // prod.coefficient) if prod.is_constant else None
                if f is None:
                    if ctx.lower(prod) >= x - init:
                        f = 1
                    else:
                        raise UnsupportedPatternError(f"unsupported pattern: cannot locate token {slot.label}")
                gf = env[ch.src].at(IndexExpr(None, f))
        elif ctx.lower(produced) + m > init:
            back = (init - m) // prod.coefficient if prod.is_constant else (0 if init - m < ctx.lower(prod) else None)
            if back != 0:
                raise UnsupportedPatternError(
                    f"unsupported pattern: token {slot.label} is written {back} firings before the end of {ch.src}"
                )
            gf = env[ch.src].at(IndexExpr(counts[ch.src]))
        else:
            raise UnsupportedPatternError(f"unsupported pattern: producer of token {slot.label} depends on the parameters")
        gf = ctx.normalize_gf(gf)
        _check(ctx, gf, f"token {slot.label}")
        row = []
        for t in g.labels:
            w = gf.get(t, W_NEG_INF)
            row.append(next(iter(w)) if w else None)
        rows.append(tuple(row))
    return SymbolicMatrix(tuple(rows), ctx.region, g.labels)


def _cases(polys):
    for k, yk in enumerate(polys):
        yield [ConflictConstraint.at_least(yk, yj) for j, yj in enumerate(polys) if j != k]


def symbolic_extract(g: PsadfGraph, schedule: QuasiStaticSchedule | None = None, omega: Region | None = None) -> list[SymbolicMatrix]:
    """One conflict-free symbolic matrix per feasible closed subregion of ``omega``."""
    schedule = schedule or quasi_static_schedule(g)
    omega = omega or Region.from_graph(g)
    counts = {a: r for a, r in schedule}
    if counts != repetition_vector(g):
        raise ValueError("schedule does not follow the repetition vector")
    cache: dict = {}
    results: list[SymbolicMatrix] = []

    def run(region: Region, step: int, env: dict):
        ctx = _Ctx(g, region, cache)
        try:
            for pos in range(step, len(schedule)):
                actor, count = schedule.entries[pos]
                try:
                    gf = _solve(ctx, env, actor, count)
                except UnsupportedPatternError as exc:
                    raise UnsupportedPatternError(f"{exc} (actor {actor}, schedule position {pos + 1})") from None
                step = pos
                _check(ctx, ctx.normalize_gf(gf.final()), f"actor {actor}")
                env = {**env, actor: gf}
                step = pos + 1
            m = _assemble(ctx, env, counts)
        except _Conflict as c:
            for case in _cases(c.polys):
                sub = region.with_conflicts(*case)
                if feasible(sub)[0]:
                    run(sub, step, env)
            return
        if m not in results:
            results.append(m)

    if not feasible(omega)[0]:
        from .optimize import InfeasibleRegionError

        raise InfeasibleRegionError("infeasible region: no parameter point satisfies the constraints")
    run(omega, 0, {})
    return results


def evaluate_symbolic(m: SymbolicMatrix, point: Mapping) -> MaxPlusMatrix:
    if not m.region.contains(point):
        raise RegionError("point lies outside the matrix region; look up the region that contains it first")
    pt = dict(point)
    for a, t in m.region.aliases:
        pt.setdefault(a, t.evaluate(pt))
    rows = tuple(tuple(NEG_INF if p is None else p.evaluate(pt) for p in row) for row in m.entries)
    return MaxPlusMatrix(rows, m.labels)


def region_of(matrices, point: Mapping) -> list[SymbolicMatrix]:
    return [m for m in matrices if m.region.contains(point)]
