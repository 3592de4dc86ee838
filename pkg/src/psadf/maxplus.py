"""Exact (max,+) algebra over the rationals extended with minus infinity.

Finite values are :class:`fractions.Fraction`; the absorbing element is the
float ``-inf``, which Python compares and adds exactly against fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx

NEG_INF = float("-inf")


def mp(x) -> Fraction | float:
    """Normalize ``x`` to a max-plus value (Fraction or NEG_INF)."""
    if x is None:
        return NEG_INF
    if isinstance(x, float):
        if x == NEG_INF:
            return NEG_INF
        if x != x or x == float("inf"):
            raise ValueError(f"not a max-plus value: {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if s in ("-inf", "-oo", "NEG_INF"):
            return NEG_INF
        return Fraction(s)
    return Fraction(x)


def oplus(a, b):
    return a if a >= b else b


def otimes(a, b):
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


def fmt_value(x) -> str:
    return "-inf" if x == NEG_INF else str(x)


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class MaxPlusMatrix:
    """Square max-plus matrix indexed by initial tokens.

    Entry ``(i, j)`` is the minimal delay from token ``j`` of the previous
    iteration to token ``i`` of the current one.
    """

    entries: tuple[tuple, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        rows = tuple(tuple(mp(x) for x in row) for row in self.entries)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionError("matrix must be square")
        labels = tuple(self.labels) if self.labels else tuple(f"t{i + 1}" for i in range(n))
        if len(labels) != n:
            raise DimensionError(f"{len(labels)} labels for {n}x{n} matrix")
        if len(set(labels)) != n:
            raise ValueError("token labels must be unique")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], labels: Sequence[str] | None = None):
        return cls(tuple(tuple(r) for r in rows), tuple(labels) if labels else ())

    @classmethod
    def identity(cls, labels: Sequence[str]):
        n = len(labels)
        return cls(tuple(tuple(0 if i == j else NEG_INF for j in range(n)) for i in range(n)), tuple(labels))

    @classmethod
    def neg_inf(cls, labels: Sequence[str]):
        n = len(labels)
        return cls(tuple((NEG_INF,) * n for _ in range(n)), tuple(labels))

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def finite_count(self) -> int:
        return sum(1 for row in self.entries for x in row if x != NEG_INF)

    def permuted(self, perm: Sequence[int]) -> "MaxPlusMatrix":
        """Reorder rows, columns and labels: new index k holds old ``perm[k]``."""
        rows = tuple(tuple(self.entries[perm[i]][perm[j]] for j in range(self.n)) for i in range(self.n))
        return MaxPlusMatrix(rows, tuple(self.labels[p] for p in perm))

    def __str__(self):
        width = max([len(fmt_value(x)) for row in self.entries for x in row] + [1])
        return "\n".join(" ".join(fmt_value(x).rjust(width) for x in row) for row in self.entries)


def _check_same(a: MaxPlusMatrix, b: MaxPlusMatrix):
    if a.n != b.n:
        raise DimensionError(f"dimension mismatch: {a.n} vs {b.n}")
    if a.labels != b.labels:
        raise DimensionError("token label mismatch")


def mp_matvec(m: MaxPlusMatrix, v: Sequence) -> tuple:
    if len(v) != m.n:
        raise DimensionError(f"vector of length {len(v)} for {m.n}x{m.n} matrix")
    v = [mp(x) for x in v]
    out = []
    for row in m.entries:
        acc = NEG_INF
        for a, x in zip(row, v):
            acc = oplus(acc, otimes(a, x))
        out.append(acc)
    return tuple(out)


def mp_matmul(a: MaxPlusMatrix, b: MaxPlusMatrix) -> MaxPlusMatrix:
    _check_same(a, b)
    n = a.n
    cols = [[b.entries[k][j] for k in range(n)] for j in range(n)]
    rows = []
    for i in range(n):
        ai = a.entries[i]
        row = []
        for j in range(n):
            acc = NEG_INF
            for x, y in zip(ai, cols[j]):
                acc = oplus(acc, otimes(x, y))
            row.append(acc)
        rows.append(tuple(row))
    return MaxPlusMatrix(tuple(rows), a.labels)


def mp_power(m: MaxPlusMatrix, k: int) -> MaxPlusMatrix:
    if k < 0:
        raise ValueError("negative power")
    out = MaxPlusMatrix.identity(m.labels)
    for _ in range(k):
        out = mp_matmul(m, out)
    return out


def elementwise_max(ms: Sequence[MaxPlusMatrix]) -> MaxPlusMatrix:
    ms = list(ms)
    if not ms:
        raise ValueError("elementwise_max of an empty list")
    first = ms[0]
    for other in ms[1:]:
        _check_same(first, other)
    rows = tuple(
        tuple(max(m.entries[i][j] for m in ms) for j in range(first.n)) for i in range(first.n)
    )
    return MaxPlusMatrix(rows, first.labels)


@dataclass(frozen=True)
class Mpag:
    """(max,+) automaton graph: one node per token, edge j -> i per finite g_ij."""

    labels: tuple[str, ...]
    edges: tuple[tuple[int, int, Fraction], ...]

    @property
    def n(self) -> int:
        return len(self.labels)

    def successors(self):
        succ = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            succ[u].append((v, w))
        return succ


def build_mpag(m: MaxPlusMatrix) -> Mpag:
    edges = tuple(
        (j, i, m.entries[i][j])
        for j in range(m.n)
        for i in range(m.n)
        if m.entries[i][j] != NEG_INF
    )
    return Mpag(m.labels, edges)


def _cycle_mean(cycle, weight):
    total = sum(weight[(cycle[k], cycle[(k + 1) % len(cycle)])] for k in range(len(cycle)))
    return Fraction(total, len(cycle))


def _rotate_min(cycle):
    k = cycle.index(min(cycle))
    return cycle[k:] + cycle[:k]


def _karp_scc(nodes, succ_in_scc):
    """Karp's recurrence on one strongly connected component.

    Returns ``(lambda, walk)`` where ``walk`` is the maximizing length-k walk
    ending at the maximizing node.
    """
    k = len(nodes)
    index = {v: i for i, v in enumerate(nodes)}
    pred_edges = [[] for _ in range(k)]
    for u in nodes:
        for v, w in succ_in_scc[u]:
            pred_edges[index[v]].append((index[u], w))
    for lst in pred_edges:
        lst.sort(key=lambda t: t[0])
    dist = [[NEG_INF] * k for _ in range(k + 1)]
    pred = [[-1] * k for _ in range(k + 1)]
    dist[0][0] = Fraction(0)
    for step in range(1, k + 1):
        prev, cur, pcur = dist[step - 1], dist[step], pred[step]
        for v in range(k):
            best, arg = NEG_INF, -1
            for u, w in pred_edges[v]:
                if prev[u] == NEG_INF:
                    continue
                cand = prev[u] + w
                if cand > best:
                    best, arg = cand, u
            cur[v], pcur[v] = best, arg
    lam, vstar = None, -1
    for v in range(k):
        if dist[k][v] == NEG_INF:
            continue
        worst = None
        for j in range(k):
            if dist[j][v] == NEG_INF:
                continue
            val = (dist[k][v] - dist[j][v]) / (k - j)
            if worst is None or val < worst:
                worst = val
        if worst is not None and (lam is None or worst > lam):
            lam, vstar = worst, v
    walk = [vstar]
    v = vstar
    for step in range(k, 0, -1):
        v = pred[step][v]
        walk.append(v)
    walk.reverse()
    return lam, [nodes[i] for i in walk]


def _cycles_in_walk(walk):
    stack, pos, found = [], {}, []
    for v in walk:
        if v in pos:
            start = pos[v]
            cyc = stack[start:]
            found.append(cyc)
            for u in cyc:
                del pos[u]
            del stack[start:]
        pos[v] = len(stack)
        stack.append(v)
    return found


def _critical_cycle(nodes, succ, weight, lam):
    """Fallback: a cycle in the tight subgraph of the reduced weights w - lambda."""
    pot = {v: Fraction(0) for v in nodes}
    for _ in range(len(nodes)):
        for u in nodes:
            for v, w in succ[u]:
                cand = pot[u] + w - lam
                if cand > pot[v]:
                    pot[v] = cand
    tight = nx.DiGraph()
    tight.add_nodes_from(nodes)
    for u in nodes:
        for v, w in succ[u]:
            if pot[u] + w - lam == pot[v]:
                tight.add_edge(u, v)
    for cyc in nx.simple_cycles(tight):
        if _cycle_mean(cyc, weight) == lam:
            return cyc
    raise AssertionError("no critical cycle found")  # pragma: no cover


def mcm(g: Mpag) -> tuple:
    """Maximum cycle mean and one critical cycle (node indices in edge order).

    Returns ``(NEG_INF, [])`` for an acyclic graph.
    """
    succ_all = g.successors()
    weight = {}
    for u, v, w in g.edges:
        weight[(u, v)] = max(weight.get((u, v), NEG_INF), w)
    graph = nx.DiGraph()
    graph.add_nodes_from(range(g.n))
    graph.add_edges_from((u, v) for u, v, _ in g.edges)
    best_lam, best_cycle = NEG_INF, []
    comps = sorted((sorted(c) for c in nx.strongly_connected_components(graph)), key=lambda c: c[0])
    for comp in comps:
        members = set(comp)
        if len(comp) == 1 and (comp[0], comp[0]) not in weight:
            continue
        succ = {u: [(v, weight[(u, v)]) for v, _ in succ_all[u] if v in members] for u in comp}
        succ = {u: sorted(set(lst), key=lambda t: t[0]) for u, lst in succ.items()}
        lam, walk = _karp_scc(comp, succ)
        if lam is None or lam <= best_lam:
            continue
        cycle = None
        for cyc in sorted(_cycles_in_walk(walk), key=lambda c: (min(c), len(c))):
            if _cycle_mean(cyc, weight) == lam:
                cycle = cyc
                break
        if cycle is None:
            cycle = _critical_cycle(comp, succ, weight, lam)
        best_lam, best_cycle = lam, _rotate_min(list(cycle))
    return best_lam, best_cycle


class NoCycleError(ValueError):
    pass


def throughput_from_matrix(m: MaxPlusMatrix) -> Fraction:
    lam, _ = mcm(build_mpag(m))
    if lam == NEG_INF:
        raise NoCycleError("no cycle: throughput unbounded by initial tokens")
    if lam <= 0:
        raise NoCycleError(f"maximum cycle mean {lam} is not positive: throughput unbounded")
    return 1 / lam


def brute_force_mcm(g: Mpag) -> Fraction | float:
    """Reference oracle: enumerate every simple cycle."""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(g.n))
    weight = {}
    for u, v, w in g.edges:
        weight[(u, v)] = max(weight.get((u, v), NEG_INF), w)
        graph.add_edge(u, v)
    best = NEG_INF
    for cyc in nx.simple_cycles(graph):
        best = max(best, _cycle_mean(cyc, weight))
    return best


def cycle_mean(g: Mpag, cycle: Iterable[int]) -> Fraction:
    weight = {}
    for u, v, w in g.edges:
        weight[(u, v)] = max(weight.get((u, v), NEG_INF), w)
    return _cycle_mean(list(cycle), weight)
