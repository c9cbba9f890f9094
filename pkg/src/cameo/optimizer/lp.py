"""Bounded-variable linear programs and their solver front-end.

Models are built name-first (every variable is addressable for result
extraction and independent auditing) and solved through scipy's HiGHS
backend.  Statuses are data: Infeasible/Unbounded never raise; genuine
numerical breakdown does.
"""

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from ..errors import InvariantError, NumericalFailureError

LE, EQ = "<=", "=="


@dataclass
class LinearProgram:
    """maximize objective @ x subject to bounds and sparse rows."""

    objective: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    rows: List[Tuple[Dict[int, float], str, float]]
    var_names: Dict[str, int]

    @property
    def n(self) -> int:
        return len(self.objective)

    def __post_init__(self):
        if np.any(self.lower > self.upper):
            raise InvariantError("variable lower bound exceeds upper bound")
        for coeffs, sense, _ in self.rows:
            if sense not in (LE, EQ):
                raise InvariantError(f"unknown row sense {sense!r}")
            for idx in coeffs:
                if not 0 <= idx < self.n:
                    raise InvariantError(f"row references undeclared variable {idx}")

    def index(self, name: str) -> int:
        return self.var_names[name]


class LPBuilder:
    def __init__(self):
        self._obj: List[float] = []
        self._lower: List[float] = []
        self._upper: List[float] = []
        self._rows: List[Tuple[Dict[int, float], str, float]] = []
        self._names: Dict[str, int] = {}

    def add_var(self, name: str, lb: float = 0.0, ub: float = np.inf,
                obj: float = 0.0) -> int:
        if name in self._names:
            raise InvariantError(f"variable {name!r} declared twice")
        idx = len(self._obj)
        self._names[name] = idx
        self._obj.append(obj)
        self._lower.append(lb)
        self._upper.append(ub)
        return idx

    def add_le(self, coeffs: Dict[int, float], rhs: float) -> None:
        self._rows.append((dict(coeffs), LE, rhs))

    def add_eq(self, coeffs: Dict[int, float], rhs: float) -> None:
        self._rows.append((dict(coeffs), EQ, rhs))

    def build(self) -> LinearProgram:
        return LinearProgram(objective=np.array(self._obj, dtype=float),
                             lower=np.array(self._lower, dtype=float),
                             upper=np.array(self._upper, dtype=float),
                             rows=self._rows, var_names=dict(self._names))


@dataclass
class LPSolution:
    status: str                      # Optimal | Infeasible | Unbounded
    objective: Optional[float]
    x: Optional[np.ndarray]
    iterations: int
    solve_ms: float
    values: Dict[str, float] = field(default_factory=dict)

    def value(self, name: str) -> float:
        return self.values[name]


def _rows_to_matrices(lp: LinearProgram):
    data = {LE: ([], [], [], []), EQ: ([], [], [], [])}  # rows, cols, vals, rhs
    for coeffs, sense, rhs in lp.rows:
        rows, cols, vals, rhss = data[sense]
        r = len(rhss)
        for idx, coef in coeffs.items():
            rows.append(r)
            cols.append(idx)
            vals.append(coef)
        rhss.append(rhs)
    out = {}
    for sense, (rows, cols, vals, rhss) in data.items():
        if rhss:
            out[sense] = (sparse.csr_matrix((vals, (rows, cols)),
                                            shape=(len(rhss), lp.n)),
                          np.array(rhss, dtype=float))
        else:
            out[sense] = (None, None)
    return out[LE], out[EQ]


def solve_lp(lp: LinearProgram, tol: float = 1e-7) -> LPSolution:
    """Solve `lp` to the requested feasibility/optimality tolerance."""
    (a_ub, b_ub), (a_eq, b_eq) = _rows_to_matrices(lp)
    bounds = np.column_stack([lp.lower, lp.upper])
    started = time.perf_counter()
    res = linprog(c=-lp.objective, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                  bounds=bounds, method="highs",
                  options={"primal_feasibility_tolerance": tol,
                           "dual_feasibility_tolerance": tol})
    solve_ms = (time.perf_counter() - started) * 1000.0

    iterations = int(getattr(res, "nit", 0) or 0)
    if res.status == 0:
        x = np.asarray(res.x, dtype=float)
        values = {name: float(x[idx]) for name, idx in lp.var_names.items()}
        return LPSolution(status="Optimal", objective=float(-res.fun), x=x,
                          iterations=iterations, solve_ms=solve_ms, values=values)
    if res.status == 2:
        return LPSolution(status="Infeasible", objective=None, x=None,
                          iterations=iterations, solve_ms=solve_ms)
    if res.status == 3:
        return LPSolution(status="Unbounded", objective=None, x=None,
                          iterations=iterations, solve_ms=solve_ms)
    raise NumericalFailureError(f"LP solver failed (status {res.status}): {res.message}")
