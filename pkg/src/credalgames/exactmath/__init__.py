"""Exact rational arithmetic, LP solving, and V-represented polytopes."""

from .linprog import (
    EQUAL,
    GREATER_EQUAL,
    INFEASIBLE,
    LESS_EQUAL,
    OPTIMAL,
    UNBOUNDED,
    Constraint,
    LinearProgram,
    LpSolution,
    lp_feasible,
    lp_solve,
)
from .polytope import (
    Polytope,
    affine_image,
    polytope_contains,
    polytope_equal,
    polytope_minimize,
)
from .rational import Rational, approx_decimal, format_rational, rat
from .vector import (
    DimensionMismatchError,
    Vector,
    matrix_apply,
    solve_square_system,
    unit_vector,
)

__all__ = [
    "Constraint",
    "DimensionMismatchError",
    "EQUAL",
    "GREATER_EQUAL",
    "INFEASIBLE",
    "LESS_EQUAL",
    "LinearProgram",
    "LpSolution",
    "OPTIMAL",
    "Polytope",
    "Rational",
    "UNBOUNDED",
    "Vector",
    "affine_image",
    "approx_decimal",
    "format_rational",
    "lp_feasible",
    "lp_solve",
    "matrix_apply",
    "polytope_contains",
    "polytope_equal",
    "polytope_minimize",
    "rat",
    "solve_square_system",
    "unit_vector",
]
