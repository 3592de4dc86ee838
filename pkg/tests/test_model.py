import warnings
from fractions import Fraction

import pytest

from psadf.expr import RateExpr
from psadf.model import (
    BoundsWarning,
    DeadlockError,
    InconsistentGraphError,
    ModelError,
    UnsupportedRateStructure,
    bind,
    dag_decompose,
    quasi_static_schedule,
    repetition_vector,
    validate,
)
from psadf.modelfile import parse_model


def graph(body, kind="psadf"):
    return parse_model(f'{kind} "t"\n{body}').graph


def test_nested_example_is_valid(nested):
    assert validate(nested.graph) == []


def test_repetition_vector_of_nested_loops(nested):
    rv = repetition_vector(nested.graph)
    assert {a: str(r) for a, r in rv.items()} == {"A": "1", "B": "p", "C": "p*q", "D": "s", "E": "1"}


def test_schedule_string(nested):
    assert str(quasi_static_schedule(nested.graph)) == "AB^pC^{p*q}D^sE"


def test_tokens_numbered_in_channel_order(nested):
    g = nested.graph
    assert g.labels == ("t1", "t2", "t3", "t4", "t5")
    assert [(t.channel, t.position) for t in g.tokens][-2:] == [(3, 1), (3, 2)]


def test_concrete_repetition_vector(fig1):
    assert repetition_vector(fig1.graph) == {
        "A": RateExpr(1), "B": RateExpr(1), "C": RateExpr(2), "D": RateExpr(1), "E": RateExpr(1)
    }


def test_inconsistent_rates():
    g = graph(
        "actor A exec 1\nactor B exec 1\nchan A -> B rates 2 : 1\nchan B -> A rates 1 : 1 init 3",
        kind="sdf",
    )
    with pytest.raises(InconsistentGraphError, match="not consistent"):
        repetition_vector(g)
    assert any("not consistent" in d for d in validate(g))


def test_repetition_vector_is_minimal_monomial():
    g = graph(
        "actor A exec 1\nactor B exec 1\nchan A -> B rates 2 : 4\nchan B -> A rates 4 : 2 init 4",
        kind="sdf",
    )
    assert repetition_vector(g) == {"A": RateExpr(2), "B": RateExpr(1)}
    g = graph(
        "rateparam p in [1, 4]\nactor A exec 1\nactor B exec 1\n"
        "chan A -> B rates 2*p : 1\nchan B -> A rates 1 : 2*p init 8",
    )
    assert repetition_vector(g) == {"A": RateExpr(1), "B": RateExpr(2, (("p", 1),))}
    g = graph(
        "rateparam p in [1, 4]\nactor A exec 1\nactor B exec 1\nactor C exec 1\n"
        "chan A -> B rates p : 2\nchan B -> C rates 1 : 1\nchan C -> A rates 2 : p init 8",
    )
    with pytest.raises(UnsupportedRateStructure):
        repetition_vector(g)


def test_cycle_without_tokens_deadlocks():
    g = graph(
        "actor A exec 1\nactor B exec 1\nchan A -> A rates 1 : 1 init 1\n"
        "chan A -> B rates 1 : 1\nchan B -> A rates 1 : 1",
        kind="sdf",
    )
    with pytest.raises(DeadlockError, match="deadlocked cycle"):
        dag_decompose(g)
    assert any("deadlocked cycle" in d for d in validate(g))


def test_modifier_period_must_match_iteration():
    g = graph(
        "rateparam p in [1, 4] modifier B every 1\nactor A exec 1\nactor B exec 1\n"
        "chan A -> A rates 1 : 1 init 1\nchan A -> B rates p : 1\nchan B -> A rates 1 : p init 4"
    )
    assert any("between iterations" in d for d in validate(g))


def test_undeclared_names_reported():
    g = graph("actor A exec 1\nchan A -> A rates 1 : 1 init 1\nchan A -> Z rates r : 1")
    diags = validate(g)
    assert any("undeclared rate parameter r" in d for d in diags)
    assert any("unknown actor Z" in d for d in diags)


def test_bind_evaluates_rates_and_times(nested):
    b = bind(nested.graph, {"p": 10, "q": 10, "s": 100, "ci": 1})
    assert b.kind == "sdf"
    assert dict(b.actors)["A"].constant == 30
    assert [ch.consumption.coefficient for ch in b.channels][7] == 100


def test_bind_checks_types(nested):
    with pytest.raises(ModelError, match="missing"):
        bind(nested.graph, {"p": 10})
    with pytest.raises(ModelError, match="positive integer"):
        bind(nested.graph, {"p": Fraction(21, 2), "q": 10, "s": 100, "ci": 1})
    with pytest.raises(ModelError, match="unknown"):
        bind(nested.graph, {"p": 10, "q": 10, "s": 100, "ci": 1, "zz": 1})
    with pytest.raises(ModelError, match="contradicts"):
        bind(nested.graph, {"p": 10, "q": 10, "s": 100, "ci": 1, "a": 7})


def test_bind_outside_bounds_warns(nested):
    with pytest.warns(BoundsWarning):
        bind(nested.graph, {"p": 1500, "q": 10, "s": 100, "ci": 1})
