"""Independent feasibility audit of sizing solutions.

Re-derives every constraint from the raw case data and a name->value
solution mapping.  Deliberately shares no code with the model builders:
this is the second route that keeps the LP construction honest.
"""

import math

import numpy as np

from ..scenario.tree import ScenarioTree
from .sizing import SizingCase, _day_arrays


def _check_block(violations, label, values, w, interconnect, eta, duration,
                 p, atol):
    T = len(w)
    cap = duration * p

    def v(name):
        return values[name]

    for t in range(T):
        u, c = v(f"u[{label},{t}]"), v(f"c[{label},{t}]")
        g, r = v(f"g[{label},{t}]"), v(f"r[{label},{t}]")
        e_t, e_next = v(f"e[{label},{t}]"), v(f"e[{label},{t + 1}]")
        for name, val in (("u", u), ("c", c), ("g", g), ("r", r), ("e", e_t)):
            if val < -atol:
                violations.append(f"{name}[{label},{t}] = {val} < 0")
        if u + c > w[t] + atol:
            violations.append(f"wind split violated at [{label},{t}]: {u + c} > {w[t]}")
        if u + g > interconnect + atol:
            violations.append(f"export limit violated at [{label},{t}]: {u + g}")
        if c > p + atol:
            violations.append(f"charge rate above P at [{label},{t}]: {c}")
        if g > p + atol:
            violations.append(f"discharge rate above P at [{label},{t}]: {g}")
        if r + g > p + atol:
            violations.append(f"reserve headroom violated at [{label},{t}]: {r + g}")
        if r > eta * e_t + atol:
            violations.append(f"reserve energy backing violated at [{label},{t}]: {r}")
        if abs(e_next - (e_t + eta * c - g / eta)) > atol:
            violations.append(f"state-of-charge recursion broken at [{label},{t}]")
        if e_t > cap + atol:
            violations.append(f"state of charge above capacity at [{label},{t}]: {e_t}")
    e_last = v(f"e[{label},{T}]")
    if e_last > cap + atol or e_last < -atol:
        violations.append(f"terminal state of charge out of range for {label}: {e_last}")
    if abs(v(f"e[{label},0]") - cap / 2.0) > atol:
        violations.append(f"initial state of charge not E/2 for {label}")
    if abs(e_last - cap / 2.0) > atol:
        violations.append(f"terminal state of charge not E/2 for {label}")


def audit_solution(case: SizingCase, values: dict, atol: float = 1e-6) -> list:
    """Return human-readable violations; an empty list means feasible."""
    violations = []
    battery, site = case.battery, case.site
    eta = math.sqrt(battery.rte)
    p = values["P"]
    if p < -atol or p > battery.rating_mw + atol:
        violations.append(f"P = {p} outside [0, {battery.rating_mw}]")

    if isinstance(case.stochastic, ScenarioTree):
        tree = case.stochastic
        for m in tree.children("root"):
            wf = np.asarray(m.payload["wind_factor"], float)
            for t in range(len(wf)):
                q = values[f"q[{m.node_id},{t}]"]
                if q < -atol or q > site.interconnect_mw + atol:
                    violations.append(f"q[{m.node_id},{t}] = {q} outside [0, I]")
            for leaf in tree.children(m.node_id):
                dev = np.asarray(leaf.payload["wind_dev"], float)
                w = site.capacity_mw * np.clip(wf + dev, 0.0, 1.0)
                _check_block(violations, leaf.node_id, values, w,
                             site.interconnect_mw, eta, battery.duration_h, p, atol)
    else:
        for s, day in enumerate(case.stochastic.days):
            wf, _da, _rt, _res = _day_arrays(day)
            w = site.capacity_mw * wf
            _check_block(violations, str(s), values, w, site.interconnect_mw,
                         eta, battery.duration_h, p, atol)
    return violations
