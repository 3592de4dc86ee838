import io
import json

import jsonschema
import pytest

from conftest import MODELS
from psadf.cli import main
from psadf.report import load_schema
from psadf.symbolic import symbolic_extract
from psadf.modelfile import load_model
from psadf.polynomial import Polynomial
from psadf.symbolic import SymbolicMatrix

NESTED = str(MODELS / "psadf_example.txt")


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_throughput_sdf(tmp_path):
    code, out = run("throughput", str(MODELS / "fig1_sdf.txt"), "--json", str(tmp_path / "r.json"))
    assert code == 0
    assert "throughput = 1/32 (~0.03125)" in out
    jsonschema.validate(json.loads((tmp_path / "r.json").read_text()), load_schema())


def test_throughput_sadf(tmp_path):
    code, out = run("throughput", str(MODELS / "fig2_sadf.txt"), "--json", str(tmp_path / "r.json"))
    assert code == 0 and "throughput = 1/41" in out
    doc = json.loads((tmp_path / "r.json").read_text())
    assert set(doc["scenario_matrices"]) == {"a", "b"}
    jsonschema.validate(doc, load_schema())


def test_throughput_psadf_with_reports(tmp_path):
    code, out = run("throughput", NESTED, "--json", str(tmp_path / "r.json"), "--report", str(tmp_path / "r.tsv"))
    assert code == 0
    assert "throughput = 1/390000" in out
    assert "critical entry (3,3) = p*q*c = 390000 at (p=1300, q=15, s=100, ci=5)" in out
    assert (tmp_path / "r.tsv").read_text().startswith("# model\tpsadf\tnested-loops")


def test_extract(tmp_path):
    code, out = run("extract", NESTED, "--json", str(tmp_path / "x.json"))
    assert code == 0
    assert "region 0: b+p*q*c >= s*d" in out and "region 1: b+p*q*c <= s*d" in out
    assert len(json.loads((tmp_path / "x.json").read_text())["regions"]) == 2


def test_extract_rejects_sdf(capsys):
    assert run("extract", str(MODELS / "fig1_sdf.txt"))[0] == 3
    assert "not a psadf model" in capsys.readouterr().err


def test_evaluate():
    code, out = run("evaluate", NESTED, "--point", "p=10,q=10,s=100,ci=1")
    assert code == 0
    lines = out.splitlines()
    assert lines[3].split()[2] == "400"
    assert "region: b+p*q*c >= s*d" in out
    assert "throughput = 1/400" in out


def test_evaluate_tie_point_in_both_regions():
    code, out = run("evaluate", NESTED, "--point", "p=10,q=10,s=140,ci=1")
    assert code == 0
    assert out.count("region:") == 2


def test_evaluate_outside_space_warns(capsys):
    code, out = run("evaluate", NESTED, "--point", "p=1500,q=10,s=100,ci=1")
    assert code == 0
    assert "outside the parameter space" in capsys.readouterr().err
    assert "region: none" in out


@pytest.mark.parametrize("point", ["p=10", "p=10,q=10,s=100", "p=x,q=1,s=1,ci=1", "p=10;q=1"])
def test_evaluate_bad_points(point):
    assert run("evaluate", NESTED, "--point", point)[0] == 2


def test_check_passes():
    code, out = run("check", NESTED, "--samples", "25", "--seed", "4")
    assert code == 0 and "25/25 samples passed" in out


def test_check_zero_samples():
    code, out = run("check", NESTED, "--samples", "0")
    assert code == 0 and "0 samples" in out


def test_check_detects_corruption():
    import argparse

    from psadf.cli import cmd_check

    g = load_model(NESTED).graph
    mats = symbolic_extract(g)
    bad = [list(r) for r in mats[0].entries]
    bad[2][2] = bad[2][2] + Polynomial.const(1)
    corrupted = [SymbolicMatrix(tuple(map(tuple, bad)), mats[0].region, mats[0].labels), mats[1]]
    out = io.StringIO()
    args = argparse.Namespace(file=NESTED, samples=10, seed=1)
    assert cmd_check(args, out, matrices=corrupted) == 1
    assert "counterexample: point (" in out.getvalue()
    assert "(t3,t3): symbolic" in out.getvalue()
