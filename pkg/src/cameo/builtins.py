"""Builtin operations: the building blocks the shipped pipelines are made of.

Payloads cross the engine as plain dicts; each operation parses its
inputs into domain objects, does its work, and returns dict outputs that
match its contract.  Operations must be safe to run concurrently: they
share no mutable state and read only their own task workdir plus the
data directory named in the workflow params.
"""

import os

from .data.batteries import load_battery_catalog
from .data.history import HistoricalRecord, load_history
from .data.powercurve import DEFAULT_CURVE, PowerCurve
from .data.sites import WindFarmSite, load_sites
from .errors import TaskFailedError
from .executor.execute import TaskContext
from .optimizer.sizing import DesignResult, Economics, SizingCase, solve_design
from .payload import derive_seed
from .registry import ComponentContract, OperationRegistry
from .reporting.plots import render_design_plot
from .reporting.summary import consolidate_results, summary_to_csv
from .scenario.sets import ScenarioSet, sample_scenario_sets
from .scenario.tree import ScenarioTree, build_scenario_tree


def _curve_from_params(params) -> PowerCurve:
    spec = params.get("power_curve")
    if not spec:
        return DEFAULT_CURVE
    return PowerCurve(float(spec[0]), float(spec[1]), float(spec[2]))


def _economics_from_params(params) -> Economics:
    return Economics(years=int(params.get("years", 30)),
                     discount_rate=float(params.get("discount_rate", 0.0)))


def _site_by_id(ctx: TaskContext, site_id: str) -> WindFarmSite:
    path = ctx.resolve(os.path.join(str(ctx.params.get("data_dir", "data")), "sites.csv"))
    for site in load_sites(path):
        if site.site_id == site_id:
            return site
    raise TaskFailedError(f"site {site_id!r} not found in {path}")


def op_wind(ctx: TaskContext, site) -> dict:
    """Collect one site's hourly history from the data directory."""
    site = WindFarmSite.from_dict(site)
    data_dir = str(ctx.params.get("data_dir", "data"))
    path = ctx.resolve(os.path.join(data_dir, "history", f"{site.site_id}.csv"))
    record = load_history(path, site.site_id)
    return {"record": record.to_dict()}


def op_battery(ctx: TaskContext, catalog) -> dict:
    configs = load_battery_catalog(ctx.resolve(catalog["path"]))
    return {"configs": [c.to_dict() for c in configs]}


def op_scen_set(ctx: TaskContext, record) -> dict:
    record = HistoricalRecord.from_dict(record)
    params = ctx.params
    sets = sample_scenario_sets(
        record, n_sets=int(params.get("n_sets", 10)),
        n_days=int(params.get("n_days", 10)),
        seed=derive_seed(int(params.get("seed", 0)), record.site_id),
        curve=_curve_from_params(params))
    return {"sets": [s.to_dict() for s in sets]}


def op_scen_tree(ctx: TaskContext, record) -> dict:
    record = HistoricalRecord.from_dict(record)
    params = ctx.params
    tree = build_scenario_tree(
        record,
        branching=(int(params.get("branch_1", 4)), int(params.get("branch_2", 3))),
        seed=derive_seed(int(params.get("seed", 0)), record.site_id),
        curve=_curve_from_params(params))
    return {"tree": tree.to_dict()}


def _solve_case(ctx, stochastic, battery_dict) -> dict:
    from .data.batteries import BatteryConfig
    battery = BatteryConfig.from_dict(battery_dict)
    site = _site_by_id(ctx, stochastic.site_id)
    case = SizingCase(site=site, battery=battery, stochastic=stochastic,
                      economics=_economics_from_params(ctx.params))
    result = solve_design(case)
    if result.status != "Optimal":
        raise TaskFailedError(f"solver returned {result.status} for "
                              f"{case.stochastic_id}/{battery.config_id}")
    return {"result": result.to_dict()}


def op_design_ss(ctx: TaskContext, case) -> dict:
    scenario_set, battery = case
    return _solve_case(ctx, ScenarioSet.from_dict(scenario_set), battery)


def op_design_st(ctx: TaskContext, case) -> dict:
    tree, battery = case
    return _solve_case(ctx, ScenarioTree.from_dict(tree), battery)


def op_summarize(ctx: TaskContext, results) -> dict:
    table = consolidate_results([DesignResult.from_dict(r) for r in results])
    csv_path = os.path.join(ctx.workdir, "consolidated.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(summary_to_csv(table))
    plots = []
    for site_id in table.site_ids:
        plot_path = os.path.join(ctx.workdir, f"design_{site_id}.svg")
        with open(plot_path, "w", encoding="utf-8") as fh:
            fh.write(render_design_plot(table, site_id))
        plots.append({"path": plot_path})
    return {"summary": {"path": csv_path}, "plots": plots}


def default_registry() -> OperationRegistry:
    """Registry with every shipped operation."""
    reg = OperationRegistry()
    reg.register(ComponentContract(
        op_id="wind@1", version="1",
        inputs={"site": "WindFarmSite"}, outputs={"record": "HistoricalRecord"}),
        op_wind)
    reg.register(ComponentContract(
        op_id="battery@1", version="1",
        inputs={"catalog": "FileRef"}, outputs={"configs": "list<BatteryConfig>"}),
        op_battery)
    reg.register(ComponentContract(
        op_id="scen_set@1", version="1",
        inputs={"record": "HistoricalRecord"}, outputs={"sets": "list<ScenarioSet>"},
        emits={"sets": "n_sets"}), op_scen_set)
    reg.register(ComponentContract(
        op_id="scen_tree@1", version="1",
        inputs={"record": "HistoricalRecord"}, outputs={"tree": "ScenarioTree"}),
        op_scen_tree)
    reg.register(ComponentContract(
        op_id="design_ss@1", version="1",
        inputs={"case": "tuple<ScenarioSet,BatteryConfig>"},
        outputs={"result": "DesignResult"}), op_design_ss)
    reg.register(ComponentContract(
        op_id="design_st@1", version="1",
        inputs={"case": "tuple<ScenarioTree,BatteryConfig>"},
        outputs={"result": "DesignResult"}), op_design_st)
    reg.register(ComponentContract(
        op_id="summarize@1", version="1",
        inputs={"results": "list<DesignResult>"},
        outputs={"summary": "FileRef", "plots": "list<FileRef>"}), op_summarize)
    return reg
