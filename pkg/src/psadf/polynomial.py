"""Polynomial weights of symbolic (max,+) matrices.

A monomial is ``coeff * prod(rate^e) * [duration]``: products of rate
parameters times at most one duration parameter.  Polynomials are
conventional sums of such monomials; a symbolic max-plus weight is a set of
polynomials combined with max, the empty set standing for minus infinity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .expr import RateExpr, TimeExpr

Key = tuple  # (duration name or "", ((rate, exp), ...))


def _key_str(key: Key, coeff: Fraction) -> str:
    dur, rates = key
    factors = [r if e == 1 else f"{r}^{e}" for r, e in rates]
    if dur:
        factors.append(dur)
    mag = abs(coeff)
    if not factors:
        return str(mag)
    if mag != 1:
        factors.insert(0, str(mag))
    return "*".join(factors)


@dataclass(frozen=True)
class Polynomial:
    terms: tuple[tuple[Key, Fraction], ...] = ()

    def __post_init__(self):
        merged: dict = {}
        for key, c in self.terms:
            dur, rates = key
            k = (dur or "", tuple(sorted((str(r), int(e)) for r, e in rates if e)))
            merged[k] = merged.get(k, Fraction(0)) + Fraction(c)
        object.__setattr__(
            self, "terms", tuple(sorted((k, c) for k, c in merged.items() if c != 0))
        )

    # construction ---------------------------------------------------------
    @classmethod
    def const(cls, value) -> "Polynomial":
        return cls(((("", ()), Fraction(value)),))

    @classmethod
    def monomial(cls, coeff=1, rates: Iterable = (), duration: str | None = None) -> "Polynomial":
        return cls((((duration or "", tuple(rates)), Fraction(coeff)),))

    @classmethod
    def from_time(cls, t: TimeExpr) -> "Polynomial":
        terms = [((k, ()), c) for k, c in t.terms]
        terms.append((("", ()), t.constant))
        return cls(tuple(terms))

    @classmethod
    def from_rate(cls, r: RateExpr) -> "Polynomial":
        return cls(((("", r.factors), Fraction(r.coefficient)),))

    # algebra --------------------------------------------------------------
    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(self.terms + other.terms)

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, factor) -> "Polynomial":
        """Multiply by a rational constant or a rate monomial."""
        if isinstance(factor, RateExpr):
            out = []
            for (dur, rates), c in self.terms:
                merged = dict(rates)
                for r, e in factor.factors:
                    merged[r] = merged.get(r, 0) + e
                out.append(((dur, tuple(merged.items())), c * factor.coefficient))
            return Polynomial(tuple(out))
        f = Fraction(factor)
        return Polynomial(tuple((k, c * f) for k, c in self.terms))

    def split(self) -> tuple["Polynomial", "Polynomial"]:
        """Return ``(pos, neg)`` with ``self == pos - neg``, both nonnegative."""
        pos = Polynomial(tuple((k, c) for k, c in self.terms if c > 0))
        neg = Polynomial(tuple((k, -c) for k, c in self.terms if c < 0))
        return pos, neg

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def nonnegative_coefficients(self) -> bool:
        return all(c >= 0 for _, c in self.terms)

    @property
    def rate_params(self) -> set[str]:
        return {r for (_, rates), _ in self.terms for r, _ in rates}

    @property
    def duration_params(self) -> set[str]:
        return {d for (d, _), _ in self.terms if d}

    @property
    def params(self) -> set[str]:
        return self.rate_params | self.duration_params

    def substitute_aliases(self, aliases: Mapping[str, TimeExpr]) -> "Polynomial":
        if not aliases or not (self.duration_params & aliases.keys()):
            return self
        out = []
        for (dur, rates), c in self.terms:
            if dur in aliases:
                t = aliases[dur]
                for k, kc in t.terms:
                    out.append(((k, rates), c * kc))
                if t.constant:
                    out.append((("", rates), c * t.constant))
            else:
                out.append(((dur, rates), c))
        return Polynomial(tuple(out))

    def evaluate(self, point: Mapping) -> Fraction:
        total = Fraction(0)
        for (dur, rates), c in self.terms:
            v = c
            for r, e in rates:
                v *= Fraction(point[r]) ** e
            if dur:
                v *= Fraction(point[dur])
            total += v
        return total

    # ordering / printing ----------------------------------------------------
    def __lt__(self, other: "Polynomial") -> bool:
        return self.terms < other.terms

    def __str__(self):
        if not self.terms:
            return "0"
        out = ""
        for key, c in self.terms:
            s = _key_str(key, c)
            if not out:
                out = s if c > 0 else f"-{s}"
            else:
                out += f"+{s}" if c > 0 else f"-{s}"
        return out

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?|([+\-*]))\s*")


def _tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text!r} at {text[pos:]!r}")
        out.append(m.groups())
        pos = m.end()
    return out


def parse_polynomial(text: str, durations: Iterable[str]) -> Polynomial:
    """Parse ``a+b+2*p*q*c`` style text; names in ``durations`` are duration factors."""
    durations = set(durations)
    toks = _tokenize(text)
    if not toks:
        raise ValueError("empty polynomial")
    i, terms = 0, []
    while True:
        sign = 1
        while i < len(toks) and toks[i][3] in ("+", "-"):
            sign = -sign if toks[i][3] == "-" else sign
            i += 1
        coeff, rates, dur = Fraction(sign), {}, None
        while True:
            if i >= len(toks) or toks[i][3] is not None:
                raise ValueError(f"expected a factor in {text!r}")
            num, name, exp, _ = toks[i]
            i += 1
            if num is not None:
                coeff *= Fraction(num)
            elif name in durations:
                if exp not in (None, "1") or dur is not None:
                    raise ValueError(f"duration degree above one in {text!r}")
                dur = name
            else:
                rates[name] = rates.get(name, 0) + int(exp or 1)
            if i < len(toks) and toks[i][3] == "*":
                i += 1
                continue
            break
        terms.append(((dur or "", tuple(rates.items())), coeff))
        if i >= len(toks):
            break
        if toks[i][3] not in ("+", "-"):
            raise ValueError(f"missing operator in {text!r}")
    return Polynomial(tuple(terms))


# Symbolic max-plus weights: frozensets of polynomials; empty means -inf.
Weight = frozenset
W_NEG_INF: frozenset = frozenset()


def w_unit() -> frozenset:
    return frozenset({Polynomial()})


def w_oplus(a: frozenset, b: frozenset) -> frozenset:
    return _prune_syntactic(a | b)


def w_otimes(a: frozenset, p: Polynomial) -> frozenset:
    return frozenset(q + p for q in a)


def _prune_syntactic(w: frozenset) -> frozenset:
    """Drop polynomials dominated coefficient-wise by another member."""
    if len(w) < 2:
        return w
    items = sorted(w)
    keep = []
    for p in items:
        if any(q != p and (q - p).nonnegative_coefficients for q in items):
            continue
        keep.append(p)
    return frozenset(keep)


def weight_str(w: frozenset) -> str:
    if not w:
        return "-inf"
    parts = sorted(w)
    if len(parts) == 1:
        return str(parts[0])
    return "max(" + ", ".join(str(p) for p in parts) + ")"
