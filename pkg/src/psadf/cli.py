"""Command line: ``psadf (throughput|extract|evaluate|check) <file> [flags]``.

Exit codes: 0 success, 1 cross-check mismatch, 2 unreadable or malformed
input (including incomplete points), 3 analysis failure.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from fractions import Fraction

from .analysis import worstcase_throughput
from .crosscheck import run_check
from .maxplus import NoCycleError, build_mpag, mcm, throughput_from_matrix
from .model import AnalysisError, ModelError, _structural_problems, bind, validate
from .modelfile import Model, ModelParseError, load_model
from .report import (
    base_report,
    decimal,
    matrix_to_json,
    point_to_json,
    psadf_report,
    symbolic_to_json,
    text_report,
    write_json,
)
from .sdf import extract_numeric_matrix, sadf_worstcase_matrix
from .symbolic import symbolic_extract

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_ANALYSIS = 0, 1, 2, 3


class _InputError(Exception):
    pass


def _load(path) -> Model:
    try:
        model = load_model(path)
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror}") from None
    problems = _structural_problems(model.graph)
    if problems:
        raise _InputError("invalid model: " + "; ".join(problems))
    problems = validate(model.graph)
    if problems:
        raise AnalysisError("; ".join(problems))
    return model


def _require_psadf(model: Model):
    if model.kind != "psadf":
        raise AnalysisError(f"not a psadf model (kind {model.kind})")


def _print_matrix(m, out):
    print(m, file=out)


def _throughput_line(thr: Fraction) -> str:
    return f"throughput = {thr} (~{decimal(thr)})"


def cmd_throughput(args, out) -> int:
    model = _load(args.file)
    if model.kind == "psadf":
        thr, rep = worstcase_throughput(model.graph, prune=not args.no_prune)
        doc = psadf_report(model, rep)
        print(f"schedule: {rep.schedule}", file=out)
        print(f"regions: {len(rep.regions)}", file=out)
        print("worst-case matrix:", file=out)
        _print_matrix(rep.combined, out)
        for em in rep.critical_entries():
            arg = ", ".join(f"{k}={v}" for k, v in em.argmax.items())
            print(f"critical entry ({em.row + 1},{em.col + 1}) = {em.polynomial} = {em.value} at ({arg})", file=out)
        lam, cycle = rep.cycle_mean, rep.critical_cycle
    else:
        if model.kind == "sdf":
            combined = extract_numeric_matrix(model.graph)
            scen = None
        else:
            combined = sadf_worstcase_matrix(model.scenarios)
            scen = {n: matrix_to_json(extract_numeric_matrix(g)) for n, g in model.scenarios.scenarios}
        thr = throughput_from_matrix(combined)
        lam, cycle = mcm(build_mpag(combined))
        doc = base_report(model, combined, lam, cycle, thr)
        if scen is not None:
            doc["scenario_matrices"] = scen
        print("matrix:", file=out)
        _print_matrix(combined, out)
    labels = doc["combined_matrix"]["labels"]
    print(f"mcm = {lam}, critical cycle: {' -> '.join(labels[k] for k in cycle)}", file=out)
    print(_throughput_line(thr), file=out)
    if args.json:
        write_json(args.json, doc)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text_report(doc))
    return EXIT_OK


def cmd_extract(args, out) -> int:
    model = _load(args.file)
    _require_psadf(model)
    mats = symbolic_extract(model.graph)
    for k, m in enumerate(mats):
        cons = ", ".join(str(c) for c in m.region.conflicts) or "whole parameter space"
        print(f"region {k}: {cons}", file=out)
        print(m, file=out)
    if args.json:
        write_json(args.json, {"regions": [symbolic_to_json(m) for m in mats]})
    return EXIT_OK


def parse_point(text: str) -> dict:
    pt = {}
    for item in filter(None, (s.strip() for s in (text or "").split(","))):
        if "=" not in item:
            raise _InputError(f"bad point component {item!r}; expected name=value")
        k, v = (s.strip() for s in item.split("=", 1))
        try:
            pt[k] = Fraction(v)
        except (ValueError, ZeroDivisionError):
            raise _InputError(f"bad value for {k}: {v!r}") from None
    return pt


def cmd_evaluate(args, out) -> int:
    model = _load(args.file)
    g = model.graph
    pt = parse_point(args.point)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            bound = bind(g, pt)
    except ModelError as exc:
        raise _InputError(str(exc)) from None
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    numeric = extract_numeric_matrix(bound)
    print("matrix:", file=out)
    _print_matrix(numeric, out)
    if model.kind == "psadf" and g.is_parametric:
        full = {k: Fraction(v) for k, v in pt.items()}
        inside = [m for m in symbolic_extract(g) if m.region.contains(full)]
        if not inside:
            print("region: none (point outside the parameter space)", file=out)
        for m in inside:
            print(f"region: {', '.join(str(c) for c in m.region.conflicts) or 'whole parameter space'}", file=out)
    thr = throughput_from_matrix(numeric)
    print(_throughput_line(thr), file=out)
    if args.json:
        lam, cycle = mcm(build_mpag(numeric))
        doc = base_report(model, numeric, lam, cycle, thr)
        doc["point"] = point_to_json(pt)
        write_json(args.json, doc)
    return EXIT_OK


def cmd_check(args, out, matrices=None) -> int:
    model = _load(args.file)
    _require_psadf(model)
    if args.samples == 0:
        print("0 samples: nothing to check", file=out)
        return EXIT_OK
    mats = matrices if matrices is not None else symbolic_extract(model.graph)
    res = run_check(model.graph, mats, args.samples, args.seed)
    print(f"{res.passed}/{res.samples} samples passed", file=out)
    if res.failures:
        print("counterexample: " + res.failures[0].describe(model.graph.labels), file=out)
        return EXIT_MISMATCH
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psadf", description="Worst-case throughput of (parametric) dataflow graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("throughput", help="worst-case throughput")
    p.add_argument("file")
    p.add_argument("--json", metavar="PATH", help="write the full report as JSON")
    p.add_argument("--report", metavar="PATH", help="write a tab-separated text report")
    p.add_argument("--no-prune", action="store_true", help="disable monotone pruning (certification run)")

    p = sub.add_parser("extract", help="symbolic matrices per region")
    p.add_argument("file")
    p.add_argument("--json", metavar="PATH")

    p = sub.add_parser("evaluate", help="matrix and throughput at one parameter point")
    p.add_argument("file")
    p.add_argument("--point", default="", help="k=v,... for every parameter")
    p.add_argument("--json", metavar="PATH")

    p = sub.add_parser("check", help="compare symbolic matrices with simulation at sampled points")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    return parser


_COMMANDS = {"throughput": cmd_throughput, "extract": cmd_extract, "evaluate": cmd_evaluate, "check": cmd_check}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except (ModelParseError, _InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (AnalysisError, NoCycleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
