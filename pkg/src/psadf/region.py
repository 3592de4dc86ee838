"""Closed regions of the parameter space."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping

from .expr import LinearConstraint, TimeExpr
from .model import PsadfGraph, complete_point
from .polynomial import Polynomial


@dataclass(frozen=True)
class ConflictConstraint:
    """``lhs >= rhs`` between polynomials with no monomial in common."""

    lhs: Polynomial
    rhs: Polynomial

    @classmethod
    def at_least(cls, bigger: Polynomial, smaller: Polynomial) -> "ConflictConstraint":
        pos, neg = (bigger - smaller).split()
        return cls(pos, neg)

    @property
    def difference(self) -> Polynomial:
        return self.lhs - self.rhs

    def holds(self, point: Mapping) -> bool:
        return self.lhs.evaluate(point) >= self.rhs.evaluate(point)

    def __str__(self):
        if self.lhs.terms <= self.rhs.terms:
            return f"{self.lhs} >= {self.rhs}"
        return f"{self.rhs} <= {self.lhs}"


@dataclass(frozen=True)
class Region:
    rate_bounds: tuple[tuple[str, int, int], ...]
    duration_bounds: tuple[tuple[str, Fraction, Fraction, bool], ...] = ()
    aliases: tuple[tuple[str, TimeExpr], ...] = ()
    rate_constraints: tuple[LinearConstraint, ...] = ()
    duration_constraints: tuple[LinearConstraint, ...] = ()
    conflicts: tuple[ConflictConstraint, ...] = ()

    @classmethod
    def from_graph(cls, g: PsadfGraph) -> "Region":
        return cls(
            tuple((p.name, p.lo, p.hi) for p in g.rate_params),
            tuple((p.name, p.lo, p.hi, p.integer) for p in g.duration_params),
            g.aliases,
            g.rate_constraints,
            g.duration_constraints,
        )

    @property
    def rate_names(self) -> list[str]:
        return [n for n, _, _ in self.rate_bounds]

    @property
    def duration_names(self) -> list[str]:
        return [n for n, *_ in self.duration_bounds]

    @property
    def param_order(self) -> list[str]:
        return self.rate_names + self.duration_names

    @property
    def alias_map(self) -> dict[str, TimeExpr]:
        return dict(self.aliases)

    def with_conflicts(self, *constraints: ConflictConstraint) -> "Region":
        new = list(self.conflicts)
        for c in constraints:
            if c not in new:
                new.append(c)
        return replace(self, conflicts=tuple(new))

    def contains(self, point: Mapping) -> bool:
        pt = complete_point(self.aliases, {k: point[k] for k in self.param_order})
        for name, lo, hi in self.rate_bounds:
            v = Fraction(pt[name])
            if v.denominator != 1 or not lo <= v <= hi:
                return False
        for name, lo, hi, integer in self.duration_bounds:
            v = Fraction(pt[name])
            if not lo <= v <= hi or (integer and v.denominator != 1):
                return False
        if not all(c.satisfied(pt) for c in self.rate_constraints + self.duration_constraints):
            return False
        return all(c.holds(pt) for c in self.conflicts)

    def describe(self) -> list[str]:
        out = [f"{n} in [{lo}, {hi}]" for n, lo, hi in self.rate_bounds]
        out += [f"{n} in [{lo}, {hi}]{' integer' if i else ''}" for n, lo, hi, i in self.duration_bounds]
        out += [f"{a} = {t}" for a, t in self.aliases]
        out += [str(c) for c in self.rate_constraints + self.duration_constraints]
        out += [str(c) for c in self.conflicts]
        return out
