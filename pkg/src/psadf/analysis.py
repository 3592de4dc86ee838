"""Worst-case throughput of a parametric graph over its whole parameter space."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .maxplus import NEG_INF, MaxPlusMatrix, build_mpag, elementwise_max, mcm, throughput_from_matrix
from .model import PsadfGraph, QuasiStaticSchedule, quasi_static_schedule, repetition_vector
from .optimize import maximize_entries
from .region import Region
from .symbolic import SymbolicMatrix, symbolic_extract


@dataclass
class EntryMax:
    row: int
    col: int
    polynomial: object
    value: Fraction
    argmax: dict


@dataclass
class WorstCaseReport:
    repetition: dict
    schedule: QuasiStaticSchedule
    regions: list[SymbolicMatrix]
    maxima: list[list[EntryMax]]  # per region
    region_matrices: list[MaxPlusMatrix]
    combined: MaxPlusMatrix
    cycle_mean: Fraction
    critical_cycle: list[int]
    throughput: Fraction
    mpag_edges: list = field(default_factory=list)

    def critical_entries(self) -> list[EntryMax]:
        """Entry maxima lying on the critical cycle that attain the combined value."""
        cyc = self.critical_cycle
        edges = {(cyc[(k + 1) % len(cyc)], cyc[k]) for k in range(len(cyc))}
        out = []
        for entries in self.maxima:
            for em in entries:
                if (em.row, em.col) in edges and em.value == self.combined.entries[em.row][em.col]:
                    out.append(em)
        return out


def worstcase_throughput(g: PsadfGraph, prune: bool = True, omega: Region | None = None) -> tuple[Fraction, WorstCaseReport]:
    schedule = quasi_static_schedule(g)
    regions = symbolic_extract(g, schedule, omega)
    maxima, numeric = [], []
    for m in regions:
        polys = sorted({p for row in m.entries for p in row if p is not None})
        best = maximize_entries(polys, m.region, prune)
        entries = []
        for i, row in enumerate(m.entries):
            for j, p in enumerate(row):
                if p is not None:
                    v, pt = best[p]
                    entries.append(EntryMax(i, j, p, v, pt))
        maxima.append(entries)
        rows = [[None] * m.n for _ in range(m.n)]
        for i in range(m.n):
            for j in range(m.n):
                p = m.entries[i][j]
                rows[i][j] = NEG_INF if p is None else best[p][0]
        numeric.append(MaxPlusMatrix(tuple(map(tuple, rows)), m.labels))
    combined = elementwise_max(numeric)
    thr = throughput_from_matrix(combined)
    mpag = build_mpag(combined)
    lam, cycle = mcm(mpag)
    report = WorstCaseReport(
        repetition_vector(g), schedule, regions, maxima, numeric, combined, lam, cycle, thr, list(mpag.edges)
    )
    return thr, report
