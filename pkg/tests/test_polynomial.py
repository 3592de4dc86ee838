from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from psadf.expr import LinearConstraint, RateExpr, TimeExpr
from psadf.polynomial import (
    W_NEG_INF,
    Polynomial,
    parse_polynomial,
    w_oplus,
    w_otimes,
    w_unit,
    weight_str,
)

DURS = ("a", "b", "c")


def test_canonical_order_puts_duration_first():
    p = parse_polynomial("e + p*q*c + b + a", ("a", "b", "c", "e"))
    assert str(p) == "a+b+p*q*c+e"


def test_parse_round_trip_with_rationals():
    p = parse_polynomial("3/2*p^2*c - 4", DURS)
    assert str(p) == "-4+3/2*p^2*c"
    assert parse_polynomial(str(p), DURS) == p


def test_duration_degree_capped():
    with pytest.raises(ValueError, match="degree"):
        parse_polynomial("a*b", DURS)


@pytest.mark.parametrize("bad", ["", "p+", "p q", "*p", "2**p"])
def test_parse_rejects_garbage(bad):
    with pytest.raises(ValueError):
        parse_polynomial(bad, DURS)


def test_zero_terms_vanish():
    p = parse_polynomial("p*c - p*c + 1", DURS)
    assert p == Polynomial.const(1)
    assert Polynomial().is_zero and str(Polynomial()) == "0"


def test_aliases_expand():
    aliases = {"a": TimeExpr((("ci", Fraction(30)),)), "c": TimeExpr((("ci", Fraction(4)),))}
    p = parse_polynomial("a+p*q*c", DURS)
    assert str(p.substitute_aliases(aliases)) == "30*ci+4*p*q*ci"


def test_split_and_scale():
    p = parse_polynomial("b+p*q*c-s*a", DURS)
    pos, neg = p.split()
    assert str(pos) == "b+p*q*c" and str(neg) == "s*a"
    assert pos - neg == p
    assert str(Polynomial.monomial(1, (), "c").scale(RateExpr(2, (("p", 1),)))) == "2*p*c"


def test_rate_expr_division():
    pq = RateExpr(1, (("p", 1), ("q", 1)))
    assert pq.divide(RateExpr.param("p")) == RateExpr.param("q")
    assert RateExpr.param("p").divide(pq) is None
    assert RateExpr(6).divide(RateExpr(4)) is None
    with pytest.raises(ValueError):
        RateExpr(0)


def test_linear_constraint_text():
    c = LinearConstraint((("q", 1), ("p", -1)), 0)
    assert str(c) == "-p + q <= 0"
    assert c.satisfied({"p": 10, "q": 10}) and not c.satisfied({"p": 10, "q": 11})


def test_weights():
    x = parse_polynomial("a+p*c", DURS)
    assert w_oplus(frozenset({x}), frozenset({x})) == frozenset({x})
    assert w_oplus(W_NEG_INF, frozenset({x})) == frozenset({x})
    assert w_oplus(frozenset({x}), frozenset({parse_polynomial("p*c", DURS)})) == frozenset({x})
    assert w_otimes(w_unit(), x) == frozenset({x})
    assert w_otimes(W_NEG_INF, x) == W_NEG_INF
    assert weight_str(W_NEG_INF) == "-inf"


monomials = st.builds(
    lambda c, rp, rq, d: Polynomial.monomial(c, (("p", rp), ("q", rq)), d),
    st.fractions(min_value=-5, max_value=5, max_denominator=4),
    st.integers(0, 2),
    st.integers(0, 2),
    st.sampled_from([None, "a", "b"]),
)
polys = st.lists(monomials, max_size=5).map(lambda ms: sum(ms, Polynomial()))
points = st.fixed_dictionaries(
    {
        "p": st.integers(1, 30),
        "q": st.integers(1, 30),
        "a": st.fractions(0, 10, max_denominator=5),
        "b": st.fractions(0, 10, max_denominator=5),
    }
)


@given(polys)
def test_print_parse_round_trip(p):
    assert parse_polynomial(str(p), DURS) == p


@given(polys, polys, points)
def test_arithmetic_is_pointwise(p, q, pt):
    assert (p + q).evaluate(pt) == p.evaluate(pt) + q.evaluate(pt)
    assert (p - q).evaluate(pt) == p.evaluate(pt) - q.evaluate(pt)
    pos, neg = p.split()
    assert pos.nonnegative_coefficients and neg.nonnegative_coefficients


@given(polys, points, st.sampled_from(["p", "q", "a"]))
def test_nonnegative_polynomials_are_monotone(p, pt, name):
    pos, _ = p.split()
    bumped = dict(pt)
    bumped[name] += 1
    assert pos.evaluate(bumped) >= pos.evaluate(pt)
