import math

import numpy as np
import pytest

from cameo.data.batteries import BatteryConfig
from cameo.data.sites import WindFarmSite
from cameo.errors import InstanceTooLargeError, InvariantError
from cameo.optimizer.audit import audit_solution
from cameo.optimizer.lp import LPBuilder, solve_lp
from cameo.optimizer.oracle import brute_force_design, lipschitz_slack
from cameo.optimizer.sizing import (
    Economics, SizingCase, build_model_a, build_model_b, net_value, solve_design,
)
from cameo.scenario.sets import ScenarioSet
from cameo.scenario.tree import ScenarioTree, TreeNode

from conftest import hand_battery


# --- LP front-end -------------------------------------------------------------

def test_single_variable_at_bound():
    b = LPBuilder()
    x = b.add_var("x", 0.0, 10.0, obj=1.0)
    b.add_le({x: 1.0}, 5.0)
    sol = solve_lp(b.build())
    assert sol.status == "Optimal"
    assert math.isclose(sol.value("x"), 5.0, abs_tol=1e-9)
    assert math.isclose(sol.objective, 5.0, abs_tol=1e-9)


def test_infeasible_reported_not_raised():
    b = LPBuilder()
    x = b.add_var("x", 0.0, 10.0, obj=1.0)
    b.add_le({x: 1.0}, -1.0)
    sol = solve_lp(b.build())
    assert sol.status == "Infeasible"
    assert sol.x is None and sol.objective is None


def test_unbounded_reported():
    b = LPBuilder()
    b.add_var("x", 0.0, math.inf, obj=1.0)
    assert solve_lp(b.build()).status == "Unbounded"


def test_two_variable_vertex():
    # max 2x+3y s.t. x+y <= 4, x,y in [0,3].
    # Vertex-enumeration oracle over the candidate vertices:
    candidates = [(0, 0), (3, 0), (0, 3), (3, 1), (1, 3)]
    feasible = [(x, y) for x, y in candidates if x + y <= 4]
    best = max(feasible, key=lambda v: 2 * v[0] + 3 * v[1])
    assert best == (1, 3) and 2 * best[0] + 3 * best[1] == 11

    b = LPBuilder()
    x = b.add_var("x", 0.0, 3.0, obj=2.0)
    y = b.add_var("y", 0.0, 3.0, obj=3.0)
    b.add_le({x: 1.0, y: 1.0}, 4.0)
    sol = solve_lp(b.build())
    assert sol.status == "Optimal"
    assert math.isclose(sol.objective, 11.0, rel_tol=1e-9)
    assert math.isclose(sol.value("x"), 1.0, abs_tol=1e-7)
    assert math.isclose(sol.value("y"), 3.0, abs_tol=1e-7)


def test_builder_rejects_bad_bounds_and_duplicates():
    b = LPBuilder()
    b.add_var("x", 2.0, 1.0)
    with pytest.raises(InvariantError):
        b.build()
    b2 = LPBuilder()
    b2.add_var("x")
    with pytest.raises(InvariantError):
        b2.add_var("x")


# --- model A ---------------------------------------------------------------------

def _day(T=2, wf=None, da=None, rt=None, res=None):
    return {"wind_factor": wf or [1.0] * T, "da_usd_mwh": da or [10.0] * T,
            "rt_usd_mwh": rt or da or [10.0] * T, "res_usd_mw": res or [0.0] * T}


def _set(days, site_id="h1"):
    return ScenarioSet(set_id="s", site_id=site_id, seed=0,
                       days=tuple(days), k=len(days))


def _site(cap=1.0, limit=10.0):
    return WindFarmSite("h1", "Hand", 0.0, 0.0, cap, limit)


def test_model_a_variable_count_k1_t2():
    case = SizingCase(_site(), hand_battery(0.0), _set([_day(T=2)]))
    lp = build_model_a(case)
    assert lp.n == 1 + 1 * (5 * 2 + 1) == 12


def test_model_a_variable_count_general():
    for k, t in [(2, 3), (3, 24)]:
        case = SizingCase(_site(), hand_battery(0.0),
                          _set([_day(T=t) for _ in range(k)]))
        assert build_model_a(case).n == 1 + k * (5 * t + 1)


def test_tiny_rating_reduces_to_wind_only_export():
    # rating -> 0 limit: battery variables pinched to ~0
    day = _day(T=3, wf=[0.5, 1.0, 0.2], da=[30.0, 10.0, 50.0])
    site = _site(cap=2.0, limit=1.0)
    battery = BatteryConfig("tiny", "x", 1.0, 1e-9, 0.0, 1.0)
    result = solve_design(SizingCase(site, battery, _set([day])))
    # wind-only: export min(w, I) at each hour
    expected_daily = sum(min(2.0 * w, 1.0) * p
                         for w, p in zip(day["wind_factor"], day["da_usd_mwh"]))
    assert math.isclose(result.daily_rev_usd, expected_daily, rel_tol=1e-6)


def test_price_doubling_doubles_gross_coefficients():
    day = _day(T=2, da=[5.0, 25.0], res=[1.0, 2.0])
    case1 = SizingCase(_site(), hand_battery(0.0), _set([day]))
    day2 = _day(T=2, da=[10.0, 50.0], res=[2.0, 4.0])
    case2 = SizingCase(_site(), hand_battery(0.0), _set([day2]))
    lp1, lp2 = build_model_a(case1), build_model_a(case2)
    assert np.allclose(lp2.objective, 2.0 * lp1.objective)


def test_homogeneity_under_price_scaling():
    # cost 0, reserve 0: scaling prices by lambda scales the optimum by lambda
    day = _day(T=3, wf=[0.8, 0.1, 0.4], da=[12.0, 48.0, 25.0], res=[0.0, 0.0, 0.0])
    case = SizingCase(_site(cap=3.0, limit=2.0), hand_battery(0.0), _set([day]))
    base = solve_design(case)
    lam = 3.7
    day_scaled = dict(day, da_usd_mwh=[lam * v for v in day["da_usd_mwh"]])
    scaled = solve_design(SizingCase(_site(cap=3.0, limit=2.0), hand_battery(0.0),
                                     _set([day_scaled])))
    assert math.isclose(scaled.net_usd, lam * base.net_usd, rel_tol=1e-6)
    assert math.isclose(scaled.p_star_mw, base.p_star_mw, abs_tol=1e-5)


def test_cost_monotonicity():
    day = _day(T=3, wf=[1.0, 0.2, 0.0], da=[0.0, 20.0, 90.0])
    nets = []
    for cost in [0.0, 50.0, 150.0, 400.0, 900.0]:
        case = SizingCase(_site(), hand_battery(cost), _set([day]))
        nets.append(solve_design(case).net_usd)
    assert all(a >= b - 1e-9 for a, b in zip(nets, nets[1:]))


def test_energy_conservation_with_perfect_efficiency():
    day = _day(T=4, wf=[1.0, 0.8, 0.0, 0.0], da=[1.0, 2.0, 60.0, 55.0])
    case = SizingCase(_site(), hand_battery(0.0), _set([day]))
    sol = solve_lp(build_model_a(case))
    charge = sum(sol.value(f"c[0,{t}]") for t in range(4))
    discharge = sum(sol.value(f"g[0,{t}]") for t in range(4))
    assert abs(charge - discharge) <= 1e-6
    assert abs(sol.value("e[0,0]") - sol.value("e[0,4]")) <= 1e-6


# --- hand instance H ----------------------------------------------------------------

def test_hand_instance_zero_cost(hand_site, hand_set):
    result = solve_design(SizingCase(hand_site, hand_battery(0.0), hand_set))
    assert result.status == "Optimal"
    assert math.isclose(result.p_star_mw, 1.0, abs_tol=1e-7)
    assert math.isclose(result.daily_rev_usd, 50.0, rel_tol=1e-9)
    assert math.isclose(result.gross_usd, 547_500.0, rel_tol=1e-9)
    assert math.isclose(result.net_usd, 547_500.0, rel_tol=1e-9)
    assert math.isclose(result.e_star_mwh, 1.0, abs_tol=1e-7)


def test_hand_instance_costly_battery_chooses_zero(hand_site, hand_set):
    result = solve_design(SizingCase(hand_site, hand_battery(600.0), hand_set))
    assert result.status == "Optimal"
    assert abs(result.p_star_mw) <= 1e-7
    assert abs(result.net_usd) <= 1e-3


def test_flat_prices_make_storage_worthless(hand_site):
    day = _day(T=4, wf=[1.0, 1.0, 0.5, 0.5], da=[40.0, 40.0, 40.0, 40.0])
    result = solve_design(SizingCase(hand_site, hand_battery(10.0), _set([day])))
    assert abs(result.p_star_mw) <= 1e-6


# --- net value ------------------------------------------------------------------------

def test_net_value_undiscounted():
    money = net_value(50.0, hand_battery(0.0), 0.0, Economics(years=30))
    assert money == {"gross_usd": 547_500.0, "cost_usd": 0.0, "net_usd": 547_500.0}


def test_net_value_zero_size_has_zero_cost():
    money = net_value(10.0, hand_battery(500.0), 0.0)
    assert money["cost_usd"] == 0.0


def test_net_value_discounted_matches_closed_form_annuity():
    r, years, daily = 0.05, 30, 50.0
    money = net_value(daily, hand_battery(0.0), 0.0, Economics(years, r))
    annuity = (1 - (1 + r) ** -years) / r          # closed form, independent route
    assert math.isclose(money["gross_usd"], daily * 365.0 * annuity, rel_tol=1e-12)


def test_net_identity_gross_minus_cost():
    money = net_value(100.0, hand_battery(200.0), 3.0, Economics(10, 0.02))
    assert math.isclose(money["net_usd"], money["gross_usd"] - money["cost_usd"],
                        rel_tol=1e-12)


# --- model B -----------------------------------------------------------------------

def _tree_from(da, wf, rt, dev, res, site_id="h1"):
    return ScenarioTree(tree_id="t", site_id=site_id, seed=0, branching=(1, 1), nodes=(
        TreeNode("root", 0, None, 1.0, {"site_id": site_id}),
        TreeNode("s1-0", 1, "root", 1.0,
                 {"da_usd_mwh": list(da), "wind_factor": list(wf)}),
        TreeNode("s2-0-0", 2, "s1-0", 1.0,
                 {"rt_usd_mwh": list(rt), "wind_dev": list(dev),
                  "res_usd_mw": list(res)}),
    ))


def test_model_b_variable_count_4x3_tree():
    from cameo.data.synthetic import generate_synthetic_history
    from cameo.scenario.tree import build_scenario_tree
    from cameo.demo import DEMO_SITES
    hist = generate_synthetic_history(DEMO_SITES[0], 3, 30)
    tree = build_scenario_tree(hist, (4, 3), seed=1)
    site = DEMO_SITES[0]
    case = SizingCase(site, BatteryConfig("b", "x", 4.0, 100.0, 300.0, 0.85), tree)
    lp = build_model_b(case)
    assert lp.n == 1 + 4 * 24 + 12 * (5 * 24 + 1) == 1549


def test_model_b_commitment_bounds_equal_interconnection_limit():
    rng = np.random.default_rng(0)
    tree = _tree_from(20 + 10 * rng.random(24), rng.random(24),
                      20 + 10 * rng.random(24), np.zeros(24), rng.random(24))
    site = WindFarmSite("h1", "H", 0.0, 0.0, 100.0, 77.5)
    lp = build_model_b(SizingCase(site, BatteryConfig("b", "x", 2.0, 10.0, 0.0, 1.0),
                                  tree))
    q_idx = [i for name, i in lp.var_names.items() if name.startswith("q[")]
    assert len(q_idx) == 24
    assert all(lp.upper[i] == 77.5 for i in q_idx)
    assert all(lp.lower[i] == 0.0 for i in q_idx)


def test_model_b_collapse_to_model_a_on_degenerate_tree():
    misses = []
    for seed in range(10):
        rng = np.random.default_rng(seed)
        wf = rng.random(24).round(4)
        da = (20 + 40 * rng.random(24)).round(3)
        res = (2 * rng.random(24)).round(3)
        dev = (0.2 * rng.random(24) - 0.1).round(4)
        site = WindFarmSite("h1", "H", 0.0, 0.0,
                            float(100 + 200 * rng.random()),
                            float(80 + 150 * rng.random()))
        battery = BatteryConfig("b", "x", float(rng.choice([2, 4])),
                                float(50 + 100 * rng.random()),
                                float(rng.choice([0, 100])),
                                float(0.7 + 0.3 * rng.random()))
        tree = _tree_from(da, wf, da, dev, res)   # p_rt == p_da
        leaf_wf = np.clip(wf + dev, 0.0, 1.0)
        day = {"wind_factor": list(leaf_wf), "da_usd_mwh": list(da),
               "rt_usd_mwh": list(da), "res_usd_mw": list(res)}
        obj_a = solve_lp(build_model_a(SizingCase(site, battery, _set([day])))).objective
        obj_b = solve_lp(build_model_b(SizingCase(site, battery, tree))).objective
        if abs(obj_b - obj_a) > 1e-6 * (1 + abs(obj_a)):
            misses.append((seed, obj_a, obj_b))
    assert not misses, misses


def test_model_b_rejects_invalid_tree():
    from cameo.errors import TreeInvalidError
    bad = ScenarioTree("t", "h1", 0, (1, 1), (
        TreeNode("root", 0, None, 1.0, {}),
        TreeNode("s1-0", 1, "root", 0.5,
                 {"da_usd_mwh": [1.0] * 24, "wind_factor": [0.0] * 24}),
    ))
    with pytest.raises(TreeInvalidError):
        build_model_b(SizingCase(_site(), hand_battery(0.0), bad))


# --- brute-force oracle and the feasibility audit ----------------------------------

def test_oracle_matches_lp_on_hand_instance(hand_site, hand_set):
    case = SizingCase(hand_site, hand_battery(0.0), hand_set)
    oracle = brute_force_design(case, grid_m=4)
    lp_result = solve_design(case)
    assert math.isclose(oracle.p_star_mw, 1.0, abs_tol=1e-12)
    slack = lipschitz_slack(case, 4)
    assert lp_result.net_usd >= oracle.net_usd - 1e-9
    assert abs(lp_result.net_usd - oracle.net_usd) <= slack
    assert math.isclose(oracle.net_usd, 547_500.0, rel_tol=1e-12)


def test_oracle_tiny_rating_single_grid_point():
    day = _day(T=2, wf=[0.5, 0.25], da=[30.0, 40.0])
    site = _site(cap=2.0, limit=0.6)
    battery = BatteryConfig("tiny", "x", 1.0, 1e-12, 0.0, 1.0)
    oracle = brute_force_design(SizingCase(site, battery, _set([day])), grid_m=4)
    wind_only = sum(min(2.0 * w, 0.6) * p
                    for w, p in zip(day["wind_factor"], day["da_usd_mwh"]))
    assert math.isclose(oracle.daily_rev_usd, wind_only, rel_tol=1e-9)


def test_oracle_refuses_large_instances(hand_site):
    days = [_day(T=4), _day(T=4)]
    with pytest.raises(InstanceTooLargeError):
        brute_force_design(SizingCase(hand_site, hand_battery(0.0), _set(days)))
    with pytest.raises(InstanceTooLargeError):
        brute_force_design(SizingCase(hand_site, hand_battery(0.0),
                                      _set([_day(T=2)])), grid_m=9)


def test_randomized_oracle_audit_sweep():
    """LP optimum dominates the grid oracle; solutions pass the auditor."""
    for seed in range(20):
        rng = np.random.default_rng(1000 + seed)
        T = int(rng.integers(2, 4))
        day = {"wind_factor": list(rng.random(T).round(3)),
               "da_usd_mwh": list((50 * rng.random(T)).round(2)),
               "rt_usd_mwh": list((50 * rng.random(T)).round(2)),
               "res_usd_mw": list((3 * rng.random(T)).round(2))}
        site = WindFarmSite("r1", "R", 0.0, 0.0, float(2 + 8 * rng.random()),
                            float(1 + 6 * rng.random()))
        battery = BatteryConfig("b", "x", float(rng.choice([1, 2])),
                                float(0.5 + 3 * rng.random()),
                                float(rng.choice([0.0, 20.0, 200.0])),
                                float(rng.choice([1.0, 0.81])))
        case = SizingCase(site, battery, _set([day], site_id="r1"))
        sol = solve_lp(build_model_a(case))
        assert sol.status == "Optimal", f"seed {seed}"
        lp_net = solve_design(case).net_usd
        oracle = brute_force_design(case, grid_m=4)
        assert lp_net >= oracle.net_usd - 1e-9, f"seed {seed}"
        violations = audit_solution(case, sol.values, atol=1e-6)
        assert not violations, f"seed {seed}: {violations[:3]}"


def test_audit_catches_corrupted_solutions(hand_site, hand_set):
    case = SizingCase(hand_site, hand_battery(0.0), hand_set)
    sol = solve_lp(build_model_a(case))
    assert audit_solution(case, sol.values) == []
    for name, delta in [("c[0,0]", 5.0), ("e[0,1]", 1.0), ("P", 3.0),
                        ("g[0,1]", 2.0)]:
        corrupted = dict(sol.values)
        corrupted[name] += delta
        assert audit_solution(case, corrupted), f"tampering {name} went unnoticed"


def test_audit_checks_model_b_solutions():
    rng = np.random.default_rng(3)
    tree = _tree_from((20 + 10 * rng.random(24)).round(2), rng.random(24).round(3),
                      (20 + 10 * rng.random(24)).round(2),
                      (0.1 * rng.random(24)).round(3), rng.random(24).round(3))
    site = WindFarmSite("h1", "H", 0.0, 0.0, 50.0, 40.0)
    case = SizingCase(site, BatteryConfig("b", "x", 2.0, 20.0, 10.0, 0.9), tree)
    sol = solve_lp(build_model_b(case))
    assert sol.status == "Optimal"
    assert audit_solution(case, sol.values) == []
    corrupted = dict(sol.values)
    corrupted["q[s1-0,5]"] = 1000.0
    assert audit_solution(case, corrupted)


# --- result serialization ---------------------------------------------------------

def test_design_result_roundtrip_and_invariants(hand_site, hand_set):
    result = solve_design(SizingCase(hand_site, hand_battery(0.0), hand_set))
    from cameo.optimizer.sizing import DesignResult
    again = DesignResult.from_dict(result.to_dict())
    assert again == result
    assert math.isclose(result.e_star_mwh,
                        result.p_star_mw * result.duration_h, abs_tol=1e-9)
    assert math.isclose(result.net_usd, result.gross_usd - result.cost_usd,
                        abs_tol=1e-6)
