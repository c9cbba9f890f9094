"""Battery sizing models: expected-revenue (scenario set) and multi-stage
(scenario tree) formulations sharing one physical constraint block.

Conventions (hourly steps, dt = 1 h):
  P           battery power size, the single design variable, in [0, rating]
  E = d * P   energy capacity locked to the catalog duration d
  eta         per-direction efficiency, sqrt(round-trip efficiency)
  per hour:   u wind export, c charge (from wind only), g discharge,
              r reserve capacity offered, e state of charge (e has one
              extra node per day; boundaries pinned to E/2)
Physical block per hour: u+c <= w, u+g <= I, c <= P, g <= P, e <= E,
e' = e + eta*c - g/eta, r <= P - g, r <= eta*e.

The scenario-set model settles all energy at the day-ahead price and
prices reserve capacity; real-time prices drive recourse only in the
tree model, where a day-ahead commitment q in [0, I] is shared across all
real-time children of its stage-1 node (non-anticipativity by
construction) and deviations (u+g) - q settle at the leaf's real-time
price.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import InvariantError, TreeInvalidError
from ..data.batteries import BatteryConfig
from ..data.history import DayProfile
from ..data.sites import WindFarmSite
from ..scenario.sets import ScenarioSet
from ..scenario.tree import ScenarioTree, validate_tree
from .lp import LinearProgram, LPBuilder, solve_lp


@dataclass(frozen=True)
class Economics:
    years: int = 30
    discount_rate: float = 0.0

    def annuity_days(self) -> float:
        """Discounted number of revenue days over the horizon."""
        r = self.discount_rate
        return sum(365.0 / (1.0 + r) ** y for y in range(1, self.years + 1))

    def to_dict(self) -> dict:
        return {"years": self.years, "discount_rate": self.discount_rate}


@dataclass(frozen=True)
class SizingCase:
    site: WindFarmSite
    battery: BatteryConfig
    stochastic: Union[ScenarioSet, ScenarioTree]
    economics: Economics = Economics()

    def __post_init__(self):
        if self.stochastic.site_id != self.site.site_id:
            raise InvariantError(
                f"stochastic input is for site {self.stochastic.site_id!r}, "
                f"case site is {self.site.site_id!r}")

    @property
    def stochastic_id(self) -> str:
        if isinstance(self.stochastic, ScenarioSet):
            return self.stochastic.set_id
        return self.stochastic.tree_id


@dataclass(frozen=True)
class DesignResult:
    site_id: str
    battery_id: str
    chemistry: str
    duration_h: float
    rating_mw: float
    stochastic_id: str
    p_star_mw: float
    e_star_mwh: float
    daily_rev_usd: float
    gross_usd: float
    cost_usd: float
    net_usd: float
    status: str
    solve_ms: float
    iterations: int

    def __post_init__(self):
        if self.status == "Optimal":
            if not -1e-9 <= self.p_star_mw <= self.rating_mw * (1 + 1e-9) + 1e-9:
                raise InvariantError(f"P*={self.p_star_mw} outside [0, {self.rating_mw}]")
            if abs(self.e_star_mwh - self.p_star_mw * self.duration_h) > 1e-6:
                raise InvariantError("E* must equal P* times duration")
            if abs(self.net_usd - (self.gross_usd - self.cost_usd)) > 1e-6:
                raise InvariantError("net must equal gross minus installation cost")

    def to_dict(self) -> dict:
        return {
            "site_id": self.site_id, "battery_id": self.battery_id,
            "chemistry": self.chemistry, "duration_h": self.duration_h,
            "rating_mw": self.rating_mw, "stochastic_id": self.stochastic_id,
            "p_star_mw": self.p_star_mw, "e_star_mwh": self.e_star_mwh,
            "daily_rev_usd": self.daily_rev_usd, "gross_usd": self.gross_usd,
            "cost_usd": self.cost_usd, "net_usd": self.net_usd,
            "status": self.status, "solve_ms": self.solve_ms,
            "iterations": self.iterations,
        }

    @staticmethod
    def from_dict(d) -> "DesignResult":
        return DesignResult(**d)


RESULT_CSV_HEADER = [
    "site_id", "battery_id", "chemistry", "duration_h", "rating_mw",
    "stochastic_id", "p_star_mw", "e_star_mwh", "daily_rev_usd", "gross_usd",
    "cost_usd", "net_usd", "status", "solve_ms", "iterations",
]


def net_value(daily_rev_usd: float, battery: BatteryConfig, p_mw: float,
              economics: Economics = Economics()) -> dict:
    """Lifetime gross revenue, installation cost and net value for a size P."""
    if not math.isfinite(daily_rev_usd):
        raise InvariantError("daily revenue must be finite")
    if p_mw < 0:
        raise InvariantError("P must be non-negative")
    gross = daily_rev_usd * economics.annuity_days()
    cost = 1000.0 * battery.cost_usd_per_kw * p_mw
    return {"gross_usd": gross, "cost_usd": cost, "net_usd": gross - cost}


def _day_arrays(day):
    """Accept DayProfile or a plain dict with the four hourly series."""
    if isinstance(day, DayProfile):
        return (np.asarray(day.wind_factor, float), np.asarray(day.da_usd_mwh, float),
                np.asarray(day.rt_usd_mwh, float), np.asarray(day.res_usd_mw, float))
    return (np.asarray(day["wind_factor"], float), np.asarray(day["da_usd_mwh"], float),
            np.asarray(day["rt_usd_mwh"], float), np.asarray(day["res_usd_mw"], float))


def _add_physical_block(b: LPBuilder, label: str, w: np.ndarray,
                        interconnect: float, eta: float, duration: float,
                        p_idx: int, obj_energy: np.ndarray, obj_reserve: np.ndarray):
    """Declare u/c/g/r/e for one day (or leaf) and wire the battery physics.

    obj_energy[t] is the objective coefficient for u and g at hour t;
    obj_reserve[t] the coefficient for r.  Returns the variable indices.
    """
    T = len(w)
    u = [b.add_var(f"u[{label},{t}]", 0.0, np.inf, obj_energy[t]) for t in range(T)]
    c = [b.add_var(f"c[{label},{t}]") for t in range(T)]
    g = [b.add_var(f"g[{label},{t}]", 0.0, np.inf, obj_energy[t]) for t in range(T)]
    r = [b.add_var(f"r[{label},{t}]", 0.0, np.inf, obj_reserve[t]) for t in range(T)]
    e = [b.add_var(f"e[{label},{t}]") for t in range(T + 1)]

    for t in range(T):
        b.add_le({u[t]: 1.0, c[t]: 1.0}, float(w[t]))            # charge from wind only
        b.add_le({u[t]: 1.0, g[t]: 1.0}, interconnect)           # export limit
        b.add_le({c[t]: 1.0, p_idx: -1.0}, 0.0)                  # c <= P
        b.add_le({g[t]: 1.0, p_idx: -1.0}, 0.0)                  # g <= P
        b.add_le({r[t]: 1.0, g[t]: 1.0, p_idx: -1.0}, 0.0)       # reserve headroom
        b.add_le({r[t]: 1.0, e[t]: -eta}, 0.0)                   # reserve energy backing
        b.add_eq({e[t + 1]: 1.0, e[t]: -1.0, c[t]: -eta, g[t]: 1.0 / eta}, 0.0)
    for t in range(T + 1):
        b.add_le({e[t]: 1.0, p_idx: -duration}, 0.0)             # e <= E = duration*P
    b.add_eq({e[0]: 1.0, p_idx: -duration / 2.0}, 0.0)           # e_0 = E/2
    b.add_eq({e[T]: 1.0, p_idx: -duration / 2.0}, 0.0)           # e_T = E/2
    return u, c, g, r, e


def build_model_a(case: SizingCase) -> LinearProgram:
    """Expected-revenue sizing LP over a scenario set.

    Variable count is 1 + K*(5*T + 1): the size P plus, per day, four
    hourly series and T+1 state-of-charge nodes.  `days` entries may be
    DayProfile instances or plain dicts (arbitrary uniform T), which keeps
    hand-checkable tiny instances expressible.
    """
    sset = case.stochastic
    if not isinstance(sset, ScenarioSet):
        raise InvariantError("model A requires a ScenarioSet input")
    days = [_day_arrays(d) for d in sset.days]
    lengths = {len(series) for day in days for series in day}
    if len(lengths) != 1:
        raise InvariantError("day series must share one length")

    battery, site = case.battery, case.site
    eta = math.sqrt(battery.rte)
    scale = case.economics.annuity_days() / sset.k

    b = LPBuilder()
    p_idx = b.add_var("P", 0.0, battery.rating_mw, -1000.0 * battery.cost_usd_per_kw)
    for s, (wf, da, _rt, res) in enumerate(days):
        w = site.capacity_mw * wf
        _add_physical_block(b, str(s), w, site.interconnect_mw, eta,
                            battery.duration_h, p_idx,
                            obj_energy=scale * da, obj_reserve=scale * res)
    return b.build()


def build_model_b(case: SizingCase) -> LinearProgram:
    """Multi-stage sizing LP over a validated 3-stage scenario tree."""
    tree = case.stochastic
    if not isinstance(tree, ScenarioTree):
        raise InvariantError("model B requires a ScenarioTree input")
    report = validate_tree(tree)
    if not report.ok:
        raise TreeInvalidError("; ".join(f.message for f in report.errors))

    battery, site = case.battery, case.site
    eta = math.sqrt(battery.rte)
    scale = case.economics.annuity_days()

    b = LPBuilder()
    p_idx = b.add_var("P", 0.0, battery.rating_mw, -1000.0 * battery.cost_usd_per_kw)

    for m in tree.children("root"):
        da = np.asarray(m.payload["da_usd_mwh"], float)
        wf = np.asarray(m.payload["wind_factor"], float)
        leaves = tree.children(m.node_id)
        T = len(da)

        # day-ahead commitment, shared across this node's children
        q_obj = np.zeros(T)
        leaf_data = []
        for leaf in leaves:
            rt = np.asarray(leaf.payload["rt_usd_mwh"], float)
            res = np.asarray(leaf.payload["res_usd_mw"], float)
            dev = np.asarray(leaf.payload["wind_dev"], float)
            pi = m.prob * leaf.prob
            q_obj += pi * (da - rt)
            leaf_data.append((leaf, rt, res, dev, pi))
        q = [b.add_var(f"q[{m.node_id},{t}]", 0.0, site.interconnect_mw,
                       scale * q_obj[t]) for t in range(T)]
        del q  # bounds and objective fully define the commitment variables

        for leaf, rt, res, dev, pi in leaf_data:
            factor = np.clip(wf + dev, 0.0, 1.0)
            w = site.capacity_mw * factor
            _add_physical_block(b, leaf.node_id, w, site.interconnect_mw, eta,
                                battery.duration_h, p_idx,
                                obj_energy=scale * pi * rt,
                                obj_reserve=scale * pi * res)
    return b.build()


def _daily_revenue_a(case: SizingCase, values) -> float:
    sset = case.stochastic
    total = 0.0
    for s, day in enumerate(sset.days):
        _wf, da, _rt, res = _day_arrays(day)
        for t in range(len(da)):
            total += da[t] * (values[f"u[{s},{t}]"] + values[f"g[{s},{t}]"])
            total += res[t] * values[f"r[{s},{t}]"]
    return total / sset.k


def _daily_revenue_b(case: SizingCase, values) -> float:
    tree = case.stochastic
    total = 0.0
    for m in tree.children("root"):
        da = np.asarray(m.payload["da_usd_mwh"], float)
        for leaf in tree.children(m.node_id):
            rt = np.asarray(leaf.payload["rt_usd_mwh"], float)
            res = np.asarray(leaf.payload["res_usd_mw"], float)
            pi = m.prob * leaf.prob
            for t in range(len(da)):
                q = values[f"q[{m.node_id},{t}]"]
                ug = values[f"u[{leaf.node_id},{t}]"] + values[f"g[{leaf.node_id},{t}]"]
                total += pi * (da[t] * q + rt[t] * (ug - q)
                               + res[t] * values[f"r[{leaf.node_id},{t}]"])
    return total


def solve_design(case: SizingCase, tol: float = 1e-7) -> DesignResult:
    """Build, solve and summarize one sizing case."""
    is_tree = isinstance(case.stochastic, ScenarioTree)
    lp = build_model_b(case) if is_tree else build_model_a(case)
    sol = solve_lp(lp, tol=tol)
    battery = case.battery

    if sol.status != "Optimal":
        return DesignResult(
            site_id=case.site.site_id, battery_id=battery.config_id,
            chemistry=battery.chemistry, duration_h=battery.duration_h,
            rating_mw=battery.rating_mw, stochastic_id=case.stochastic_id,
            p_star_mw=0.0, e_star_mwh=0.0, daily_rev_usd=0.0, gross_usd=0.0,
            cost_usd=0.0, net_usd=0.0, status=sol.status,
            solve_ms=sol.solve_ms, iterations=sol.iterations)

    p_star = min(max(sol.value("P"), 0.0), battery.rating_mw)
    daily = _daily_revenue_b(case, sol.values) if is_tree else _daily_revenue_a(case, sol.values)
    money = net_value(daily, battery, p_star, case.economics)
    return DesignResult(
        site_id=case.site.site_id, battery_id=battery.config_id,
        chemistry=battery.chemistry, duration_h=battery.duration_h,
        rating_mw=battery.rating_mw, stochastic_id=case.stochastic_id,
        p_star_mw=p_star, e_star_mwh=p_star * battery.duration_h,
        daily_rev_usd=daily, gross_usd=money["gross_usd"],
        cost_usd=money["cost_usd"], net_usd=money["net_usd"],
        status="Optimal", solve_ms=sol.solve_ms, iterations=sol.iterations)
