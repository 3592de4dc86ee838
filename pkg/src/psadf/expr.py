"""Rate monomials, linear execution times and linear constraints."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Mapping


def _merge(a, b, sign=1):
    out = dict(a)
    for k, e in b:
        out[k] = out.get(k, 0) + sign * e
        if out[k] == 0:
            del out[k]
    return tuple(sorted(out.items()))


@dataclass(frozen=True)
class RateExpr:
    """A rate: positive integer coefficient times a product of rate parameters.

    ``factors`` holds ``(name, exponent)`` pairs sorted by name.
    """

    coefficient: int = 1
    factors: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        if not isinstance(self.coefficient, int) or self.coefficient < 1:
            raise ValueError(f"rate coefficient must be a positive integer, got {self.coefficient!r}")
        facs = tuple(sorted((str(k), int(e)) for k, e in dict(self.factors).items() if e))
        if any(e < 0 for _, e in facs):
            raise ValueError("negative exponent in rate expression")
        object.__setattr__(self, "factors", facs)

    @classmethod
    def const(cls, k: int) -> "RateExpr":
        return cls(int(k))

    @classmethod
    def param(cls, name: str) -> "RateExpr":
        return cls(1, ((name, 1),))

    @property
    def is_constant(self) -> bool:
        return not self.factors

    @property
    def params(self) -> set[str]:
        return {k for k, _ in self.factors}

    def __mul__(self, other):
        if isinstance(other, int):
            return RateExpr(self.coefficient * other, self.factors)
        return RateExpr(self.coefficient * other.coefficient, _merge(self.factors, other.factors))

    __rmul__ = __mul__

    def divide(self, other: "RateExpr") -> "RateExpr | None":
        """Exact monomial quotient, or None when ``other`` does not divide ``self``."""
        if self.coefficient % other.coefficient:
            return None
        facs = _merge(self.factors, other.factors, -1)
        if any(e < 0 for _, e in facs):
            return None
        return RateExpr(self.coefficient // other.coefficient, facs)

    def evaluate(self, point: Mapping[str, int]) -> int:
        v = self.coefficient
        for k, e in self.factors:
            x = point[k]
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"rate parameter {k} must be an integer, got {x}")
                x = int(x)
            v *= x**e
        return v

    def __str__(self):
        parts = [] if self.coefficient == 1 and self.factors else [str(self.coefficient)]
        for k, e in self.factors:
            parts.append(k if e == 1 else f"{k}^{e}")
        return "*".join(parts)


@dataclass(frozen=True)
class TimeExpr:
    """Execution time: nonnegative linear form in duration parameters plus a constant."""

    terms: tuple[tuple[str, Fraction], ...] = ()
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        merged: dict[str, Fraction] = {}
        for k, c in self.terms:
            merged[k] = merged.get(k, Fraction(0)) + Fraction(c)
        terms = tuple(sorted((k, c) for k, c in merged.items() if c != 0))
        if any(c < 0 for _, c in terms) or Fraction(self.constant) < 0:
            raise ValueError("execution time coefficients must be nonnegative")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "constant", Fraction(self.constant))

    @classmethod
    def const(cls, value) -> "TimeExpr":
        return cls((), Fraction(value))

    @property
    def is_constant(self) -> bool:
        return not self.terms

    @property
    def params(self) -> set[str]:
        return {k for k, _ in self.terms}

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        return self.constant + sum((c * Fraction(point[k]) for k, c in self.terms), Fraction(0))

    def __str__(self):
        parts = [k if c == 1 else f"{c}*{k}" for k, c in self.terms]
        if self.constant or not parts:
            parts.insert(0, str(self.constant))
        return "+".join(parts)


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coeffs[k] * k) <= bound``."""

    coeffs: tuple[tuple[str, Fraction], ...]
    bound: Fraction

    def __post_init__(self):
        merged: dict[str, Fraction] = {}
        for k, c in self.coeffs:
            merged[k] = merged.get(k, Fraction(0)) + Fraction(c)
        object.__setattr__(self, "coeffs", tuple(sorted((k, c) for k, c in merged.items() if c != 0)))
        object.__setattr__(self, "bound", Fraction(self.bound))

    @property
    def params(self) -> set[str]:
        return {k for k, _ in self.coeffs}

    def lhs(self, point) -> Fraction:
        return sum((c * Fraction(point[k]) for k, c in self.coeffs), Fraction(0))

    def satisfied(self, point) -> bool:
        return self.lhs(point) <= self.bound

    def __str__(self):
        out = ""
        for k, c in self.coeffs:
            mag = abs(c)
            term = k if mag == 1 else f"{mag}*{k}"
            if not out:
                out = term if c > 0 else f"-{term}"
            else:
                out += f" + {term}" if c > 0 else f" - {term}"
        return f"{out or '0'} <= {self.bound}"


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)
