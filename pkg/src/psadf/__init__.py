"""Worst-case throughput analysis of SDF, scenario-aware and parametric dataflow graphs."""

from .analysis import worstcase_throughput
from .maxplus import NEG_INF, MaxPlusMatrix, build_mpag, mcm, throughput_from_matrix
from .model import PsadfGraph, bind, quasi_static_schedule, repetition_vector, validate
from .modelfile import load_model, parse_model
from .optimize import feasible, maximize_entry, maximize_matrix
from .region import ConflictConstraint, Region
from .sdf import extract_numeric_matrix, sadf_worstcase_matrix
from .symbolic import SymbolicMatrix, evaluate_symbolic, symbolic_extract

__all__ = [
    "NEG_INF",
    "ConflictConstraint",
    "MaxPlusMatrix",
    "PsadfGraph",
    "Region",
    "SymbolicMatrix",
    "bind",
    "build_mpag",
    "evaluate_symbolic",
    "extract_numeric_matrix",
    "feasible",
    "load_model",
    "maximize_entry",
    "maximize_matrix",
    "mcm",
    "parse_model",
    "quasi_static_schedule",
    "repetition_vector",
    "sadf_worstcase_matrix",
    "symbolic_extract",
    "throughput_from_matrix",
    "validate",
    "worstcase_throughput",
]
