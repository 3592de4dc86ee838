import random
import warnings
from fractions import Fraction

import pytest

from conftest import MODELS
from psadf.analysis import worstcase_throughput
from psadf.crosscheck import sample_point
from psadf.maxplus import build_mpag, mcm, throughput_from_matrix
from psadf.model import BoundsWarning, bind
from psadf.modelfile import parse_model
from psadf.region import Region
from psadf.sdf import extract_numeric_matrix


def variant(**bounds):
    text = (MODELS / "psadf_example.txt").read_text()
    for line in text.splitlines():
        for name, (lo, hi) in bounds.items():
            if line.startswith((f"rateparam {name} ", f"timeparam {name} ")):
                head, tail = line.split("[", 1)
                text = text.replace(line, f"{head}[{lo}, {hi}]{tail.split(']', 1)[1]}")
    return parse_model(text).graph


@pytest.fixture(scope="module")
def worst(nested):
    return worstcase_throughput(nested.graph)


def test_worst_case_throughput(worst):
    thr, rep = worst
    assert thr == Fraction(1, 390000)
    assert rep.cycle_mean == 390000
    (crit,) = rep.critical_entries()
    assert (crit.row, crit.col, str(crit.polynomial)) == (2, 2, "p*q*c")
    assert crit.argmax == {"p": 1300, "q": 15, "s": 100, "ci": 5}


def test_fixed_ci():
    thr, _ = worstcase_throughput(variant(ci=(1, 1)))
    assert thr == Fraction(1, 78000)


def test_singleton_space_matches_bound_graph(nested):
    g = variant(p=(40, 40), q=(12, 12), s=(700, 700), ci=(2, 2))
    thr, _ = worstcase_throughput(g)
    bound = bind(nested.graph, {"p": 40, "q": 12, "s": 700, "ci": 2})
    assert thr == throughput_from_matrix(extract_numeric_matrix(bound))


def test_worst_case_is_conservative(nested, worst):
    _, rep = worst
    rng = random.Random(3)
    omega = Region.from_graph(nested.graph)
    for _ in range(30):
        pt = sample_point(omega, rng)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundsWarning)
            lam_pt = mcm(build_mpag(extract_numeric_matrix(bind(nested.graph, pt))))[0]
        assert lam_pt <= rep.cycle_mean
