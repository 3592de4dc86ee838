"""JSON and plain-text analysis reports.

Every number in a JSON report is a string: ``"num/den"`` for exact
rationals and ``"-inf"`` for the max-plus zero.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

from .maxplus import NEG_INF, MaxPlusMatrix
from .polynomial import parse_polynomial
from .region import Region
from .symbolic import SymbolicMatrix


def num(x) -> str:
    if x == NEG_INF:
        return "-inf"
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def parse_num(s: str):
    if s == "-inf":
        return NEG_INF
    return Fraction(s)


def decimal(x: Fraction) -> str:
    return f"{float(x):.6g}"


def matrix_to_json(m: MaxPlusMatrix) -> dict:
    return {"labels": list(m.labels), "rows": [[num(x) for x in row] for row in m.entries]}


def matrix_from_json(d: dict) -> MaxPlusMatrix:
    return MaxPlusMatrix(tuple(tuple(parse_num(x) for x in row) for row in d["rows"]), tuple(d["labels"]))


def symbolic_to_json(m: SymbolicMatrix) -> dict:
    return {
        "constraints": m.region.describe(),
        "conflicts": [str(c) for c in m.region.conflicts],
        "duration_names": list(m.region.duration_names) + [a for a, _ in m.region.aliases],
        "labels": list(m.labels),
        "rows": [[None if p is None else str(p) for p in row] for row in m.entries],
    }


def symbolic_from_json(d: dict, region: Region) -> SymbolicMatrix:
    durs = d["duration_names"]
    rows = tuple(tuple(None if s is None else parse_polynomial(s, durs) for s in row) for row in d["rows"])
    return SymbolicMatrix(rows, region, tuple(d["labels"]))


def point_to_json(pt: dict) -> dict:
    return {k: num(v) for k, v in pt.items()}


def throughput_json(thr: Fraction) -> dict:
    return {"exact": num(thr), "decimal": decimal(thr)}


def base_report(model, combined: MaxPlusMatrix, lam, cycle, thr) -> dict:
    from .modelfile import format_model

    edges = []
    for i, row in enumerate(combined.entries):
        for j, w in enumerate(row):
            if w != NEG_INF:
                edges.append({"from": combined.labels[j], "to": combined.labels[i], "weight": num(w)})
    return {
        "model": {"kind": model.kind, "name": model.name, "text": format_model(model)},
        "combined_matrix": matrix_to_json(combined),
        "mpag": {"nodes": list(combined.labels), "edges": edges},
        "mcm": num(lam),
        "critical_cycle": [combined.labels[k] for k in cycle],
        "throughput": throughput_json(thr),
    }


def psadf_report(model, report) -> dict:
    out = base_report(model, report.combined, report.cycle_mean, report.critical_cycle, report.throughput)
    out["repetition_vector"] = {a: str(r) for a, r in report.repetition.items()}
    out["schedule"] = str(report.schedule)
    out["regions"] = [symbolic_to_json(m) for m in report.regions]
    out["entry_maxima"] = [
        {
            "region": k,
            "row": em.row + 1,
            "col": em.col + 1,
            "polynomial": str(em.polynomial),
            "value": num(em.value),
            "argmax": point_to_json(em.argmax),
        }
        for k, entries in enumerate(report.maxima)
        for em in entries
    ]
    out["region_matrices"] = [matrix_to_json(m) for m in report.region_matrices]
    return out


def load_schema() -> dict:
    text = resources.files("psadf").joinpath("schema/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def write_json(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


# ------------------------------------------------------------------ text


def _tsv_matrix(labels, rows) -> list[str]:
    out = ["\t" + "\t".join(labels)]
    for lab, row in zip(labels, rows):
        out.append(lab + "\t" + "\t".join(row))
    return out


def text_report(doc: dict) -> str:
    """Tab-separated plain-text rendering of a JSON report."""
    lines = [f"# model\t{doc['model']['kind']}\t{doc['model']['name']}"]
    if "repetition_vector" in doc:
        lines.append("# repetition vector")
        lines += [f"{a}\t{r}" for a, r in doc["repetition_vector"].items()]
        lines.append(f"# schedule\t{doc['schedule']}")
    for k, reg in enumerate(doc.get("regions", [])):
        lines.append(f"# region {k}")
        lines += [f"constraint\t{c}" for c in reg["conflicts"]] or ["constraint\t(none)"]
        lines += _tsv_matrix(reg["labels"], [["-inf" if p is None else p for p in row] for row in reg["rows"]])
    if doc.get("entry_maxima"):
        lines.append("# entry maxima")
        lines.append("region\trow\tcol\tpolynomial\tvalue\targmax")
        for e in doc["entry_maxima"]:
            arg = ",".join(f"{k}={v}" for k, v in e["argmax"].items())
            lines.append(f"{e['region']}\t{e['row']}\t{e['col']}\t{e['polynomial']}\t{e['value']}\t{arg}")
    for name, m in doc.get("scenario_matrices", {}).items():
        lines.append(f"# scenario {name}")
        lines += _tsv_matrix(m["labels"], m["rows"])
    lines.append("# combined matrix")
    cm = doc["combined_matrix"]
    lines += _tsv_matrix(cm["labels"], cm["rows"])
    lines.append("# mpag edges")
    lines += [f"{e['from']}\t{e['to']}\t{e['weight']}" for e in doc["mpag"]["edges"]]
    lines.append(f"# mcm\t{doc['mcm']}")
    lines.append(f"# critical cycle\t{' '.join(doc['critical_cycle'])}")
    lines.append(f"# throughput\t{doc['throughput']['exact']}\t{doc['throughput']['decimal']}")
    return "\n".join(lines) + "\n"
