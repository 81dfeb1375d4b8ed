"""Exact solution paths of parametric convex quadratic programs via criss-cross pivoting."""

from .builders import (
    ChoiceObservation,
    ConjointDesign,
    SvmInstance,
    build_cbc,
    build_svm_dual,
)
from .core import (
    AffineScalar,
    EpsVector,
    ParametricLCP,
    ParametricQP,
    embed_free_variables,
    qp_to_lcp,
    to_rat,
    validate_psd,
)
from .crisscross import Basis, criss_cross_solve
from .errors import InvariantError, ParseError, PQPError, StructureError
from .path import INFEASIBLE, SolutionPath, eval_path, trace_path

__version__ = "0.1.0"

__all__ = [
    "AffineScalar",
    "Basis",
    "ChoiceObservation",
    "ConjointDesign",
    "EpsVector",
    "INFEASIBLE",
    "InvariantError",
    "ParametricLCP",
    "ParametricQP",
    "ParseError",
    "PQPError",
    "SolutionPath",
    "StructureError",
    "SvmInstance",
    "build_cbc",
    "build_svm_dual",
    "criss_cross_solve",
    "embed_free_variables",
    "eval_path",
    "qp_to_lcp",
    "to_rat",
    "trace_path",
    "validate_psd",
]
