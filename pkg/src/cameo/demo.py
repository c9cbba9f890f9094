"""Self-contained demo runs: synthetic data plus the shipped pipelines.

`demo a` sweeps 5 sites x 10 scenario sets x 16 battery configs through
the scenario-set sizing pipeline (800 design tasks); `demo b` runs one
scenario tree per site against the same catalog (80 design tasks).  All
inputs are generated deterministically from the seed, so equal seeds give
byte-identical consolidated outputs.
"""

import os
import shutil
from importlib import resources

from .builtins import default_registry
from .data.batteries import write_battery_catalog
from .data.history import write_history
from .data.sites import WindFarmSite, write_sites
from .data.synthetic import generate_synthetic_history
from .executor.runner import RunOptions, run_workflow
from .provenance.report import render_provenance_report
from .provenance.stats import aggregate_stats
from .workflow.graph import build_dag
from .workflow.parser import load_workflow
from .workflow.plan import plan_tasks, resolve_sources

PIPELINES = {"a": "formulation_a.workflow.json", "b": "formulation_b.workflow.json"}

DEMO_SITES = [
    WindFarmSite("s1", "Gale Point", -124.3, 41.9, 400.0, 350.0),
    WindFarmSite("s2", "Harbor Reach", -70.6, 41.2, 300.0, 260.0),
    WindFarmSite("s3", "Mesa Verde", -103.2, 34.8, 500.0, 420.0),
    WindFarmSite("s4", "North Bluff", -122.8, 47.7, 250.0, 220.0),
    WindFarmSite("s5", "Sand Hollow", -118.9, 35.1, 350.0, 300.0),
]

# illustrative placeholder catalog; not vendor data
DEMO_CATALOG = {
    "chemistries": ["alpha", "beta"],
    "durations_h": [2, 4, 6, 8],
    "ratings_mw": [100, 1000],
    "cost_usd_per_kw": {"alpha": 950.0, "beta": 350.0},
    "rte": {"alpha": 0.92, "beta": 0.8},
}

DEFAULT_HISTORY_DAYS = 60


def generate_demo_data(data_dir, seed: int, history_days: int = DEFAULT_HISTORY_DAYS):
    """Write sites.csv, per-site history CSVs and batteries.json."""
    data_dir = str(data_dir)
    os.makedirs(os.path.join(data_dir, "history"), exist_ok=True)
    write_sites(os.path.join(data_dir, "sites.csv"), DEMO_SITES)
    write_battery_catalog(os.path.join(data_dir, "batteries.json"), DEMO_CATALOG)
    for site in DEMO_SITES:
        record = generate_synthetic_history(site, seed, history_days)
        write_history(os.path.join(data_dir, "history", f"{site.site_id}.csv"), record)
    return data_dir


def pipeline_path(formulation: str, dest_dir) -> str:
    """Copy the shipped pipeline document next to the demo data."""
    name = PIPELINES[formulation]
    target = os.path.join(str(dest_dir), name)
    source = resources.files("cameo.pipelines") / name
    with resources.as_file(source) as src:
        shutil.copyfile(src, target)
    return target


def prepare_demo(formulation: str, workdir, seed: int,
                 history_days: int = DEFAULT_HISTORY_DAYS) -> str:
    """Generate data and materialize the pipeline; returns the workflow path."""
    if formulation not in PIPELINES:
        raise ValueError(f"unknown formulation {formulation!r} (expected 'a' or 'b')")
    os.makedirs(str(workdir), exist_ok=True)
    generate_demo_data(os.path.join(str(workdir), "data"), seed, history_days)
    return pipeline_path(formulation, workdir)


def run_demo(formulation: str, workdir, seed: int = 42, max_parallel: int = 8,
             resume: bool = False, history_days: int = DEFAULT_HISTORY_DAYS,
             generate_only: bool = False) -> dict:
    """End-to-end demo; returns paths of everything produced."""
    workflow_path = prepare_demo(formulation, workdir, seed, history_days)
    out = {"workflow": workflow_path, "workdir": str(workdir), "formulation": formulation}
    if generate_only:
        return out

    spec = load_workflow(workflow_path)
    registry = default_registry()
    graph = build_dag(spec)
    base_dir = os.path.dirname(os.path.abspath(workflow_path))

    params = {"seed": seed}
    sources = resolve_sources(spec, base_dir, params)
    plan = plan_tasks(graph, sources, registry, params)
    out["plan"] = plan.to_dict()

    options = RunOptions(max_parallel=max_parallel, resume=resume,
                         workdir=str(workdir), seed=seed)
    result = run_workflow(graph, registry, options, params=params, base_dir=base_dir)
    out["run"] = result.to_dict()

    results_dir = os.path.join(str(workdir), "results")
    os.makedirs(results_dir, exist_ok=True)
    published = []
    summarize_outputs = result.outputs.get("summarize") or []
    for outputs in summarize_outputs:
        if not outputs:
            continue
        refs = [outputs.get("summary")] + list(outputs.get("plots") or [])
        for ref in refs:
            if ref and ref.get("path") and os.path.exists(ref["path"]):
                dest = os.path.join(results_dir, os.path.basename(ref["path"]))
                shutil.copyfile(ref["path"], dest)
                published.append(dest)
    out["results"] = published

    if result.executed or result.cached:
        stats = aggregate_stats(result.trace_path)
        report = render_provenance_report(
            stats, result.trace_path, os.path.join(str(workdir), "report"))
        out["report"] = report
    return out
