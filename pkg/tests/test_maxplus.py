from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from psadf.maxplus import (
    NEG_INF,
    DimensionError,
    MaxPlusMatrix,
    Mpag,
    NoCycleError,
    brute_force_mcm,
    build_mpag,
    cycle_mean,
    elementwise_max,
    mcm,
    mp,
    mp_matmul,
    mp_matvec,
    mp_power,
    oplus,
    otimes,
    throughput_from_matrix,
)

values = st.one_of(st.just(NEG_INF), st.fractions(min_value=-50, max_value=50, max_denominator=6))


def matrices(n_min=1, n_max=5, finite=values):
    return st.integers(n_min, n_max).flatmap(
        lambda n: st.lists(st.lists(finite, min_size=n, max_size=n), min_size=n, max_size=n).map(
            MaxPlusMatrix.from_rows
        )
    )


def same_size(k):
    return st.integers(1, 4).flatmap(
        lambda n: st.tuples(
            *[st.lists(st.lists(values, min_size=n, max_size=n), min_size=n, max_size=n).map(MaxPlusMatrix.from_rows) for _ in range(k)]
        )
    )


@given(values, values, values)
def test_semiring_laws(a, b, c):
    assert oplus(a, b) == oplus(b, a)
    assert oplus(oplus(a, b), c) == oplus(a, oplus(b, c))
    assert otimes(otimes(a, b), c) == otimes(a, otimes(b, c))
    assert otimes(a, oplus(b, c)) == oplus(otimes(a, b), otimes(a, c))
    assert oplus(a, NEG_INF) == a
    assert otimes(a, 0) == a
    assert otimes(a, NEG_INF) == NEG_INF
    assert oplus(a, a) == a


def test_mp_normalizes():
    assert mp("-inf") == NEG_INF
    assert mp("3/4") == Fraction(3, 4)
    assert mp(None) == NEG_INF
    with pytest.raises(ValueError):
        mp(float("nan"))


@given(same_size(3))
def test_matmul_associative(ms):
    a, b, c = ms
    assert mp_matmul(mp_matmul(a, b), c) == mp_matmul(a, mp_matmul(b, c))


@given(matrices())
def test_identity_is_neutral(m):
    e = MaxPlusMatrix.identity(m.labels)
    assert mp_matmul(e, m) == m
    assert mp_matmul(m, e) == m


@given(matrices(n_max=4), st.integers(0, 4))
def test_power_matches_repeated_product(m, k):
    acc = MaxPlusMatrix.identity(m.labels)
    for _ in range(k):
        acc = mp_matmul(acc, m)
    assert mp_power(m, k) == acc


@given(matrices(n_max=4), st.data())
def test_matvec_matches_matmul_column(m, data):
    v = data.draw(st.lists(values, min_size=m.n, max_size=m.n))
    col = MaxPlusMatrix.from_rows([[x] + [NEG_INF] * (m.n - 1) for x in v])
    prod = mp_matmul(m, col)
    assert mp_matvec(m, v) == tuple(row[0] for row in prod.entries)


def test_dimension_checks():
    a = MaxPlusMatrix.from_rows([[1, 2], [3, 4]])
    b = MaxPlusMatrix.from_rows([[1]])
    with pytest.raises(DimensionError):
        mp_matmul(a, b)
    with pytest.raises(DimensionError):
        mp_matvec(a, [1])
    with pytest.raises(DimensionError):
        MaxPlusMatrix.from_rows([[1, 2]])
    with pytest.raises(DimensionError):
        mp_matmul(a, MaxPlusMatrix.from_rows([[1, 2], [3, 4]], ["x", "y"]))


def test_elementwise_max():
    a = MaxPlusMatrix.from_rows([[1, NEG_INF], [0, 5]])
    b = MaxPlusMatrix.from_rows([[NEG_INF, 2], [3, 4]])
    assert elementwise_max([a, b]) == MaxPlusMatrix.from_rows([[1, 2], [3, 5]])


def test_mpag_edge_direction():
    m = MaxPlusMatrix.from_rows([[NEG_INF, 7], [NEG_INF, NEG_INF]])
    g = build_mpag(m)
    # g_12 = 7 is an edge from token 2 to token 1
    assert list(g.edges) == [(1, 0, Fraction(7))]


def test_mcm_small_cases():
    assert mcm(Mpag(("a",), [(0, 0, Fraction(4))])) == (4, [0])
    lam, cyc = mcm(Mpag(("a", "b"), [(0, 1, Fraction(3)), (1, 0, Fraction(1))]))
    assert lam == 2 and cyc == [0, 1]
    assert mcm(Mpag(("a", "b"), [(0, 1, Fraction(3))])) == (NEG_INF, [])


def test_throughput_errors():
    with pytest.raises(NoCycleError, match="no cycle"):
        throughput_from_matrix(MaxPlusMatrix.from_rows([[NEG_INF, 1], [NEG_INF, NEG_INF]]))
    with pytest.raises(NoCycleError):
        throughput_from_matrix(MaxPlusMatrix.from_rows([[-1]]))
    assert throughput_from_matrix(MaxPlusMatrix.from_rows([[Fraction(5, 2)]])) == Fraction(2, 5)


@given(matrices(n_max=7))
def test_mcm_matches_brute_force(m):
    g = build_mpag(m)
    lam, cyc = mcm(g)
    assert lam == brute_force_mcm(g)
    if cyc:
        assert cycle_mean(g, cyc) == lam


@given(matrices(n_max=6), st.randoms(use_true_random=False))
def test_mcm_invariant_under_relabeling(m, rnd):
    perm = list(range(m.n))
    rnd.shuffle(perm)
    assert mcm(build_mpag(m))[0] == mcm(build_mpag(m.permuted(perm)))[0]


@given(matrices(n_max=5), st.fractions(min_value=Fraction(1, 7), max_value=9, max_denominator=7))
def test_mcm_scales_linearly(m, c):
    scaled = MaxPlusMatrix.from_rows([[x if x == NEG_INF else x * c for x in row] for row in m.entries])
    lam = mcm(build_mpag(m))[0]
    lam_c = mcm(build_mpag(scaled))[0]
    assert lam_c == (NEG_INF if lam == NEG_INF else lam * c)
