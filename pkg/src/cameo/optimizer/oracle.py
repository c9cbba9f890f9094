"""Grid-enumeration verification oracle for tiny scenario-set instances.

Enumerates the size P and every per-hour (charge, discharge) combination
on a uniform grid, simulating the state of charge directly and setting
wind export and reserve greedily (optimal for non-negative prices).  Every
grid point is LP-feasible, so the LP optimum must dominate the oracle's
within rounding; the gap is bounded by the grid pitch times the price
Lipschitz constant.
"""

import itertools
import math
import time

from ..errors import InstanceTooLargeError, InvariantError
from ..scenario.sets import ScenarioSet
from .sizing import DesignResult, SizingCase, _day_arrays, net_value

_E_TOL = 1e-9


def _best_day_revenue(day, p, duration, eta, interconnect, grid):
    """Max revenue for one day at size P over the (c, g) grid, or None."""
    wf, da, _rt, res = day
    T = len(wf)
    cap = duration * p
    best = None
    hour_grid = [(c, g) for c in grid for g in grid if c <= p + _E_TOL and g <= p + _E_TOL]
    for combo in itertools.product(hour_grid, repeat=T):
        e = cap / 2.0
        revenue = 0.0
        feasible = True
        for t in range(T):
            c, g = combo[t]
            w = wf[t]  # already scaled to MW by caller
            if c > w + _E_TOL:
                feasible = False
                break
            u = max(0.0, min(w - c, interconnect - g))
            if g > interconnect + _E_TOL:
                feasible = False
                break
            r = max(0.0, min(p - g, eta * e))
            revenue += da[t] * (u + g) + res[t] * r
            e = e + eta * c - g / eta
            if e < -_E_TOL or e > cap + _E_TOL:
                feasible = False
                break
        if feasible and abs(e - cap / 2.0) <= _E_TOL:
            if best is None or revenue > best:
                best = revenue
    return best


def brute_force_design(case: SizingCase, grid_m: int = 4) -> DesignResult:
    """Best feasible grid point for a tiny case (K*T <= 6 hours, m <= 8)."""
    sset = case.stochastic
    if not isinstance(sset, ScenarioSet):
        raise InvariantError("the oracle handles scenario-set cases only")
    days = [_day_arrays(d) for d in sset.days]
    total_hours = sum(len(d[0]) for d in days)
    if total_hours > 6:
        raise InstanceTooLargeError(f"{total_hours} decision hours exceed the budget of 6")
    if grid_m > 8 or grid_m < 1:
        raise InstanceTooLargeError("grid resolution must be in [1, 8]")

    battery, site = case.battery, case.site
    eta = math.sqrt(battery.rte)
    annuity = case.economics.annuity_days()
    started = time.perf_counter()

    scaled_days = [(site.capacity_mw * wf, da, rt, res) for wf, da, rt, res in days]
    best_p, best_obj, best_daily = None, None, None
    for j in range(grid_m + 1):
        p = battery.rating_mw * j / grid_m
        grid = [battery.rating_mw * i / grid_m for i in range(grid_m + 1)]
        day_revs = []
        for day in scaled_days:
            rev = _best_day_revenue(day, p, battery.duration_h, eta,
                                    site.interconnect_mw, grid)
            if rev is None:
                break
            day_revs.append(rev)
        if len(day_revs) != len(scaled_days):
            continue
        daily = sum(day_revs) / sset.k
        objective = annuity * daily - 1000.0 * battery.cost_usd_per_kw * p
        if best_obj is None or objective > best_obj:
            best_p, best_obj, best_daily = p, objective, daily

    if best_p is None:
        raise InvariantError("no feasible grid point (the do-nothing point should exist)")
    money = net_value(best_daily, battery, best_p, case.economics)
    return DesignResult(
        site_id=site.site_id, battery_id=battery.config_id,
        chemistry=battery.chemistry, duration_h=battery.duration_h,
        rating_mw=battery.rating_mw, stochastic_id=case.stochastic_id,
        p_star_mw=best_p, e_star_mwh=best_p * battery.duration_h,
        daily_rev_usd=best_daily, gross_usd=money["gross_usd"],
        cost_usd=money["cost_usd"], net_usd=money["net_usd"], status="Optimal",
        solve_ms=(time.perf_counter() - started) * 1000.0, iterations=0)


def lipschitz_slack(case: SizingCase, grid_m: int) -> float:
    """Bound on the oracle's optimality gap: price mass times grid pitch."""
    total = 0.0
    for day in case.stochastic.days:
        _wf, da, _rt, res = _day_arrays(day)
        total += sum(abs(v) for v in da) + sum(abs(v) for v in res)
    total *= case.economics.annuity_days() / case.stochastic.k
    total += 1000.0 * case.battery.cost_usd_per_kw
    return total * case.battery.rating_mw / grid_m
