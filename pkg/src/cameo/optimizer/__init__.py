from .lp import LE, EQ, LinearProgram, LPBuilder, LPSolution, solve_lp
from .sizing import (
    RESULT_CSV_HEADER, DesignResult, Economics, SizingCase,
    build_model_a, build_model_b, net_value, solve_design,
)
from .oracle import brute_force_design, lipschitz_slack
from .audit import audit_solution

__all__ = [
    "LE", "EQ", "LinearProgram", "LPBuilder", "LPSolution", "solve_lp",
    "RESULT_CSV_HEADER", "DesignResult", "Economics", "SizingCase",
    "build_model_a", "build_model_b", "net_value", "solve_design",
    "brute_force_design", "lipschitz_slack", "audit_solution",
]
