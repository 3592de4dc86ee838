"""Cross-validation of symbolic matrices against one-iteration simulation."""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .model import BoundsWarning, PsadfGraph, bind
from .region import Region
from .sdf import extract_numeric_matrix
from .symbolic import SymbolicMatrix, evaluate_symbolic

_DENOMINATOR = 1000


def sample_point(region: Region, rng: random.Random, max_tries: int = 100000) -> dict:
    """Uniform over the integer rate lattice times the duration boxes, by rejection."""
    for _ in range(max_tries):
        pt: dict = {}
        for name, lo, hi in region.rate_bounds:
            pt[name] = rng.randint(lo, hi)
        if not all(c.satisfied(pt) for c in region.rate_constraints):
            continue
        for name, lo, hi, integer in region.duration_bounds:
            if integer:
                pt[name] = Fraction(rng.randint(int(lo), int(hi)))
            else:
                pt[name] = lo + (hi - lo) * Fraction(rng.randint(0, _DENOMINATOR), _DENOMINATOR)
        full = dict(pt)
        for a, t in region.aliases:
            full[a] = t.evaluate(full)
        if all(c.satisfied(full) for c in region.duration_constraints):
            return pt
    raise RuntimeError("could not sample a point of the parameter space")


@dataclass
class Mismatch:
    point: dict
    region: int | None
    diffs: list = field(default_factory=list)  # (row, col, symbolic, numeric)

    def describe(self, labels) -> str:
        pt = ", ".join(f"{k}={v}" for k, v in self.point.items())
        if self.region is None:
            return f"point ({pt}) is not covered by any region"
        parts = [f"({labels[i]},{labels[j]}): symbolic {s} != simulated {n}" for i, j, s, n in self.diffs]
        return f"point ({pt}), region {self.region}: " + "; ".join(parts)


@dataclass
class CheckResult:
    samples: int
    passed: int
    failures: list[Mismatch]

    @property
    def ok(self) -> bool:
        return not self.failures


def check_point(g: PsadfGraph, matrices: list[SymbolicMatrix], pt: dict) -> Mismatch | None:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundsWarning)
        numeric = extract_numeric_matrix(bind(g, pt))
    covering = [k for k, m in enumerate(matrices) if m.region.contains(pt)]
    if not covering:
        return Mismatch(dict(pt), None)
    for k in covering:
        sym = evaluate_symbolic(matrices[k], pt)
        if sym != numeric:
            diffs = [
                (i, j, sym.entries[i][j], numeric.entries[i][j])
                for i in range(sym.n)
                for j in range(sym.n)
                if sym.entries[i][j] != numeric.entries[i][j]
            ]
            return Mismatch(dict(pt), k, diffs)
    return None


def run_check(g: PsadfGraph, matrices: list[SymbolicMatrix], samples: int, seed: int) -> CheckResult:
    rng = random.Random(seed)
    region = Region.from_graph(g)
    failures = []
    for _ in range(samples):
        bad = check_point(g, matrices, sample_point(region, rng))
        if bad is not None:
            failures.append(bad)
    return CheckResult(samples, samples - len(failures), failures)
