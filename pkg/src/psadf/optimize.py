"""Exact maximization of polynomial matrix entries over parameter regions.

Integer parameters (rates and integer durations) are enumerated on their
lattice in vectorized chunks.  For every lattice point the problem left in
the continuous durations is a small linear program, solved exactly by
enumerating the vertices of its polytope with integer Cramer's rule.

Monotone pruning: when the objective has nonnegative coefficients and a rate
parameter appears only on the favourable side of every conflict constraint,
only the largest admissible value of that parameter needs to be examined for
each setting of the others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .expr import lcm
from .maxplus import NEG_INF, MaxPlusMatrix
from .model import AnalysisError
from .polynomial import Polynomial
from .region import Region

CHUNK_START = 4096
CHUNK_MAX = 1 << 20
_INT64_SAFE = 1 << 62


class InfeasibleRegionError(AnalysisError):
    pass


@dataclass
class _Form:
    """Integer linear form in the continuous variables with lattice-polynomial coefficients.

    Represents ``(const + sum_j cols[j] * x_j) / scale``; each coefficient is
    a list of ``(int, ((lattice_index, exponent), ...))`` terms.
    """

    const: list
    cols: list
    scale: int

    @property
    def is_filter(self) -> bool:
        return not any(self.cols)


def _compile(poly: Polynomial, lat_index: dict, cont_index: dict) -> _Form:
    den = 1
    for _, c in poly.terms:
        den = lcm(den, c.denominator)
    const, cols = [], [[] for _ in cont_index]
    for (dur, rates), c in poly.terms:
        exps = dict()
        for r, e in rates:
            if r not in lat_index:
                raise KeyError(f"unknown parameter {r}")
            exps[lat_index[r]] = exps.get(lat_index[r], 0) + e
        target = const
        if dur:
            if dur in lat_index:
                exps[lat_index[dur]] = exps.get(lat_index[dur], 0) + 1
            elif dur in cont_index:
                target = cols[cont_index[dur]]
            else:
                raise KeyError(f"unknown parameter {dur}")
        target.append((int(c * den), tuple(sorted(exps.items()))))
    return _Form(const, cols, den)


def _terms_bound(terms, maxabs) -> int:
    total = 0
    for c, exps in terms:
        v = abs(c)
        for k, e in exps:
            v *= maxabs[k] ** e
        total += v
    return total


def _eval_terms(terms, coords, n, dtype):
    if not terms:
        return np.zeros(n, dtype=dtype)
    acc = None
    for c, exps in terms:
        v = np.full(n, c, dtype=dtype)
        for k, e in exps:
            col = coords[:, k]
            v = v * (col if e == 1 else col**e)
        acc = v if acc is None else acc + v
    return acc


def _det(rows):
    k = len(rows)
    if k == 0:
        return 1
    if k == 1:
        return rows[0][0]
    if k == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = 0
    for j in range(k):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


class _Problem:
    def __init__(self, region: Region, objectives: Sequence[Polynomial]):
        aliases = region.alias_map
        self.lat = [(n, int(lo), int(hi)) for n, lo, hi in region.rate_bounds]
        self.n_rates = len(self.lat)
        self.cont = []
        for n, lo, hi, integer in region.duration_bounds:
            if integer:
                self.lat.append((n, math.ceil(lo), math.floor(hi)))
            else:
                self.cont.append((n, Fraction(lo), Fraction(hi)))
        self.empty = any(lo > hi for _, lo, hi in self.lat) or any(lo > hi for _, lo, hi in self.cont)
        lat_index = {n: i for i, (n, _, _) in enumerate(self.lat)}
        cont_index = {n: i for i, (n, _, _) in enumerate(self.cont)}
        self.lat_names = [n for n, _, _ in self.lat]
        self.cont_names = [n for n, _, _ in self.cont]

        def lin_poly(c):
            p = Polynomial.const(c.bound)
            for name, coef in c.coeffs:
                mono = Polynomial.monomial(coef, ((name, 1),)) if name in region.rate_names else Polynomial.monomial(coef, (), name)
                p = p - mono
            return p.substitute_aliases(aliases)

        polys = [lin_poly(c) for c in region.rate_constraints + region.duration_constraints]
        self.conflict_polys = [c.difference.substitute_aliases(aliases) for c in region.conflicts]
        polys += self.conflict_polys
        for n, lo, hi in self.cont:
            polys.append(Polynomial.monomial(1, (), n) - Polynomial.const(lo))
            polys.append(Polynomial.const(hi) - Polynomial.monomial(1, (), n))
        forms = [_compile(p, lat_index, cont_index) for p in polys]
        self.filters = [f for f in forms if f.is_filter]
        self.lp = [f for f in forms if not f.is_filter]
        self.objective_polys = [o.substitute_aliases(aliases) for o in objectives]
        self.objectives = [_compile(o, lat_index, cont_index) for o in self.objective_polys]

        maxabs = [max(abs(lo), abs(hi)) for _, lo, hi in self.lat]
        bound = 1
        for f in forms + self.objectives:
            bound = max(bound, _terms_bound(f.const, maxabs), *(_terms_bound(c, maxabs) for c in f.cols))
        d = len(self.cont)
        bd = math.factorial(d) * bound**d
        bv = (d + 1) * bound * bd
        self.dtype = np.int64 if max(bv * bd, bd * bd, bv) < _INT64_SAFE else object
        self.filter_dtype = np.int64
        for f in self.filters:
            if _terms_bound(f.const, maxabs) >= _INT64_SAFE:
                self.filter_dtype = object

    def prunable_axis(self) -> int | None:
        if not all(o.nonnegative_coefficients for o in self.objective_polys):
            return None
        best, best_size = None, 1
        for k in range(self.n_rates):
            name = self.lat_names[k]
            ok = True
            for p in self.conflict_polys:
                for (dur, rates), c in p.terms:
                    if c < 0 and name in dict(rates):
                        ok = False
            size = self.lat[k][2] - self.lat[k][1] + 1
            if ok and size > best_size:
                best, best_size = k, size
        return best


def _lex_less(nums, den, best_nums, best_den):
    less = np.zeros(len(den), dtype=bool)
    eq = np.ones(len(den), dtype=bool)
    for a, b in zip(nums, best_nums):
        lhs = a * best_den
        rhs = b * den
        less |= eq & (lhs < rhs)
        eq &= lhs == rhs
    return less


def _scan(problem: _Problem, prune: bool, stop_above=None):
    """Return per objective ``(value, lattice_point, cont_point)`` or None if infeasible."""
    nobj = len(problem.objectives)
    results = [None] * nobj
    if problem.empty:
        return results
    k_dims = len(problem.lat)
    sizes = [hi - lo + 1 for _, lo, hi in problem.lat]
    los = np.array([lo for _, lo, _ in problem.lat], dtype=np.int64)
    axis = problem.prunable_axis() if prune else None
    order = list(range(k_dims))
    if axis is not None:
        order.remove(axis)
        order.append(axis)
    shape = [sizes[k] for k in order]
    total = math.prod(shape)
    group = shape[-1] if axis is not None else 1
    d = len(problem.cont)
    dtype = problem.dtype
    subsets = list(combinations(range(len(problem.lp)), d))
    start, chunk = 0, CHUNK_START
    while start < total:
        size = min(chunk, total - start)
        if group > 1:
            size = max(group, size - size % group)
        flat = np.arange(start, start + size, dtype=np.int64)
        start += size
        chunk = min(CHUNK_MAX, chunk * 4)
        coords = np.empty((size, k_dims), dtype=np.int64)
        if k_dims:
            idx = np.unravel_index(flat, shape)
            for pos, k in enumerate(order):
                coords[:, k] = idx[pos] + los[k]
        mask = np.ones(size, dtype=bool)
        fcoords = coords if problem.filter_dtype is np.int64 else coords.astype(object)
        for f in problem.filters:
            mask &= _eval_terms(f.const, fcoords, size, problem.filter_dtype) >= 0
        if axis is not None:
            m2 = mask.reshape(-1, group)
            has = m2.any(axis=1)
            last = group - 1 - np.argmax(m2[:, ::-1], axis=1)
            keep = np.zeros_like(m2)
            rows = np.nonzero(has)[0]
            keep[rows, last[rows]] = True
            mask = keep.reshape(-1)
        sel = np.nonzero(mask)[0]
        if not len(sel):
            continue
        sub_i = coords[sel]
        sub = sub_i if dtype is np.int64 else sub_i.astype(object)
        n = len(sel)
        lp_c = [_eval_terms(f.const, sub, n, dtype) for f in problem.lp]
        lp_a = [[_eval_terms(col, sub, n, dtype) for col in f.cols] for f in problem.lp]
        obj_c = [_eval_terms(o.const, sub, n, dtype) for o in problem.objectives]
        obj_a = [[_eval_terms(col, sub, n, dtype) for col in o.cols] for o in problem.objectives]
        have = [np.zeros(n, dtype=bool) for _ in range(nobj)]
        best_val = [np.zeros(n, dtype=dtype) for _ in range(nobj)]
        best_den = [np.ones(n, dtype=dtype) for _ in range(nobj)]
        best_x = [[np.zeros(n, dtype=dtype) for _ in range(d)] for _ in range(nobj)]
        for subset in subsets:
            a_rows = [[lp_a[s][j] for j in range(d)] for s in subset]
            b = [-lp_c[s] for s in subset]
            det = _det(a_rows)
            if isinstance(det, int):
                det = np.full(n, det, dtype=dtype)
            nz = det != 0
            if not nz.any():
                continue
            nums = []
            for j in range(d):
                replaced = [row[:j] + [b[r]] + row[j + 1 :] for r, row in enumerate(a_rows)]
                nums.append(_det(replaced))
            sign = np.where(det < 0, -1, 1).astype(dtype)
            den = det * sign
            nums = [x * sign for x in nums]
            feas = nz.copy()
            for c, a in zip(lp_c, lp_a):
                lhs = c * den
                for j in range(d):
                    lhs = lhs + a[j] * nums[j]
                feas &= lhs >= 0
            if not feas.any():
                continue
            for o in range(nobj):
                val = obj_c[o] * den
                for j in range(d):
                    val = val + obj_a[o][j] * nums[j]
                lhs = val * best_den[o]
                rhs = best_val[o] * den
                better = feas & (~have[o] | (lhs > rhs) | ((lhs == rhs) & _lex_less(nums, den, best_x[o], best_den[o])))
                if better.any():
                    best_val[o] = np.where(better, val, best_val[o])
                    best_den[o] = np.where(better, den, best_den[o])
                    best_x[o] = [np.where(better, x, bx) for x, bx in zip(nums, best_x[o])]
                    have[o] |= better
        for o in range(nobj):
            if not have[o].any():
                continue
            cand = np.nonzero(have[o])[0]
            vals, dens = best_val[o][cand], best_den[o][cand]
            approx = vals.astype(float) / dens.astype(float)
            top = approx.max()
            near = cand[approx >= top - abs(top) * 1e-9 - 1e-9]
            vo = best_val[o][near].astype(object)
            do = best_den[o][near].astype(object)
            i0 = int(np.argmax(vo.astype(float) / do.astype(float)))
            while True:
                greater = vo * do[i0] > vo[i0] * do
                if not greater.any():
                    break
                i0 = int(np.nonzero(greater)[0][0])
            ties = near[vo * do[i0] == vo[i0] * do]
            if k_dims:
                keys = sub_i[ties]
                pick = ties[np.lexsort(keys.T[::-1])[0]]
            else:
                pick = ties[0]
            scale = problem.objectives[o].scale
            value = Fraction(int(best_val[o][pick]), int(best_den[o][pick]) * scale)
            lat_pt = tuple(int(x) for x in sub_i[pick])
            cont_pt = tuple(Fraction(int(x[pick]), int(best_den[o][pick])) for x in best_x[o])
            cur = results[o]
            if cur is None or value > cur[0] or (value == cur[0] and lat_pt < cur[1]):
                results[o] = (value, lat_pt, cont_pt)
        if stop_above is not None and any(r is not None and r[0] > stop_above for r in results):
            break
    return results


def _point(problem: _Problem, res) -> dict:
    _, lat_pt, cont_pt = res
    pt = {n: v for n, v in zip(problem.lat_names, lat_pt)}
    for i, (n, _, _) in enumerate(problem.lat):
        if i >= problem.n_rates:
            pt[n] = Fraction(pt[n])
    pt.update(zip(problem.cont_names, cont_pt))
    return pt


def _ordered(region: Region, pt: dict) -> dict:
    return {k: pt[k] for k in region.param_order}


def feasible(region: Region) -> tuple[bool, dict | None]:
    """Decide nonemptiness; returns a witness point when nonempty."""
    problem = _Problem(region, [Polynomial()])
    (res,) = _scan(problem, prune=False, stop_above=-1)
    if res is None:
        return False, None
    return True, _ordered(region, _point(problem, res))


def max_over_region(obj: Polynomial, region: Region, stop_above=None):
    """Maximum of an arbitrary-sign polynomial, optionally stopping once it exceeds ``stop_above``."""
    problem = _Problem(region, [obj])
    (res,) = _scan(problem, prune=False, stop_above=stop_above)
    if res is None:
        return None, None
    return res[0], _ordered(region, _point(problem, res))


def dominates(q: Polynomial, p: Polynomial, region: Region) -> bool:
    """True when ``q >= p`` at every point of the region."""
    diff = q - p
    if diff.nonnegative_coefficients:
        return True
    pos, neg = diff.split()
    for c in region.conflicts:
        if c.lhs == pos and c.rhs == neg:
            return True
    aliases = region.alias_map
    if diff.substitute_aliases(aliases).nonnegative_coefficients:
        return True
    value, _ = max_over_region(p - q, region, stop_above=0)
    return value is None or value <= 0


_MEMO: dict = {}


def maximize_entries(polys: Iterable[Polynomial], region: Region, prune: bool = True) -> dict:
    """Maximize several entries with one shared enumeration; results are memoized."""
    todo = []
    out = {}
    for p in polys:
        key = (p, region, prune)
        if key in _MEMO:
            out[p] = _MEMO[key]
        elif p not in todo:
            todo.append(p)
    if todo:
        for p in todo:
            if not p.nonnegative_coefficients:
                raise ValueError(f"objective {p} has negative coefficients")
        problem = _Problem(region, todo)
        results = _scan(problem, prune)
        for p, res in zip(todo, results):
            if res is None:
                raise InfeasibleRegionError("infeasible region: no parameter point satisfies the constraints")
            val = (res[0], _ordered(region, _point(problem, res)))
            _MEMO[(p, region, prune)] = val
            out[p] = val
    return out


def maximize_entry(obj: Polynomial, region: Region, prune: bool = True) -> tuple[Fraction, dict]:
    return maximize_entries([obj], region, prune)[obj]


def maximize_matrix(m, prune: bool = True) -> MaxPlusMatrix:
    """Entrywise maximum of a symbolic matrix over its region."""
    polys = {p for row in m.entries for p in row if p is not None}
    if not polys:
        return MaxPlusMatrix(tuple((NEG_INF,) * len(row) for row in m.entries), m.labels)
    best = maximize_entries(sorted(polys), m.region, prune)
    rows = tuple(tuple(NEG_INF if p is None else best[p][0] for p in row) for row in m.entries)
    return MaxPlusMatrix(rows, m.labels)


def enumerate_max(obj: Polynomial, region: Region):
    """Brute-force reference: scalar loop over every lattice point, exact LP per point.

    Only for small regions; used to certify :func:`maximize_entry`.
    """
    from itertools import product

    problem = _Problem(region, [obj])
    if problem.empty:
        return None
    ranges = [range(lo, hi + 1) for _, lo, hi in problem.lat]
    best = None
    for lat_pt in product(*ranges):
        pt = dict(zip(problem.lat_names, lat_pt))
        val = _scalar_lp(problem, pt)
        if val is not None and (best is None or val > best):
            best = val
    return best


def _scalar_lp(problem: _Problem, pt: dict):
    """Exact LP in the continuous variables by brute-force vertex enumeration with Fractions."""
    coords = np.array([[pt[n] for n in problem.lat_names]], dtype=object)
    for f in problem.filters:
        if _eval_terms(f.const, coords, 1, object)[0] < 0:
            return None

    def ev(terms):
        return Fraction(_eval_terms(terms, coords, 1, object)[0])

    rows = [(ev(f.const), [ev(c) for c in f.cols]) for f in problem.lp]
    obj = problem.objectives[0]
    oc, oa = ev(obj.const), [ev(c) for c in obj.cols]
    d = len(problem.cont)
    best = None
    for subset in combinations(range(len(rows)), d):
        mat = [list(rows[s][1]) for s in subset]
        rhs = [-rows[s][0] for s in subset]
        x = _solve_fraction(mat, rhs)
        if x is None:
            continue
        if all(c + sum(a * xi for a, xi in zip(av, x)) >= 0 for c, av in rows):
            val = (oc + sum(a * xi for a, xi in zip(oa, x))) / obj.scale
            if best is None or val > best:
                best = val
    return best


def _solve_fraction(mat, rhs):
    n = len(mat)
    a = [list(map(Fraction, row)) + [Fraction(r)] for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]
