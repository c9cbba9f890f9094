"""Service-layer actions shared by the HTTP routes and the local CLI.

Each action takes a pydantic request and returns a pydantic response, so
the CLI can run them in-process with identical semantics to the HTTP
surface.
"""

import os
import threading
import uuid
from typing import Dict

from ..builtins import default_registry
from ..demo import run_demo
from ..errors import CameoError, RunAbortedError
from ..executor.runner import RunOptions, run_workflow
from ..provenance.report import render_provenance_report
from ..provenance.stats import aggregate_stats
from ..workflow.graph import build_dag
from ..workflow.parser import load_workflow, parse_workflow
from ..workflow.plan import plan_tasks, resolve_sources
from ..workflow.validate import validate_workflow
from . import schemas


def validate_action(req: schemas.ValidateRequest) -> schemas.ValidateResponse:
    if req.document is not None:
        spec = parse_workflow(req.document)
    elif req.workflow_path:
        spec = load_workflow(req.workflow_path)
    else:
        raise CameoError("provide workflow_path or document")
    report = validate_workflow(spec, default_registry())
    return schemas.ValidateResponse(
        ok=report.ok, errors=len(report.errors), warnings=len(report.warnings),
        findings=[schemas.FindingModel(**f.to_dict()) for f in report.findings])


def plan_action(req: schemas.PlanRequest) -> schemas.PlanResponse:
    spec = load_workflow(req.workflow_path)
    registry = default_registry()
    graph = build_dag(spec)
    base_dir = os.path.dirname(os.path.abspath(req.workflow_path))
    params = dict(req.params)
    sources = resolve_sources(spec, base_dir, params)
    plan = plan_tasks(graph, sources, registry, params)
    return schemas.PlanResponse(counts=plan.counts, total=plan.total,
                                channel_counts=plan.channel_counts)


def _run_sync(req: schemas.RunRequest) -> schemas.RunSummary:
    spec = load_workflow(req.workflow_path)
    registry = default_registry()
    graph = build_dag(spec)
    base_dir = os.path.dirname(os.path.abspath(req.workflow_path))
    options = RunOptions(max_parallel=req.max_parallel, resume=req.resume,
                         workdir=req.workdir, seed=req.seed)
    result = run_workflow(graph, registry, options, params=dict(req.params),
                          base_dir=base_dir)
    summary = result.to_dict()
    summary.pop("outputs", None)
    return schemas.RunSummary(**summary)


class RunRegistry:
    """In-memory registry of background runs (one service process)."""

    def __init__(self):
        self._runs: Dict[str, schemas.RunResponse] = {}
        self._lock = threading.Lock()

    def submit(self, req: schemas.RunRequest) -> schemas.RunResponse:
        run_id = uuid.uuid4().hex[:12]
        entry = schemas.RunResponse(run_id=run_id, state="running")
        with self._lock:
            self._runs[run_id] = entry

        def work():
            try:
                summary = _run_sync(req)
                update = schemas.RunResponse(run_id=run_id, state="done", result=summary)
            except RunAbortedError as exc:
                update = schemas.RunResponse(run_id=run_id, state="aborted", error=str(exc))
            except Exception as exc:
                update = schemas.RunResponse(run_id=run_id, state="error", error=str(exc))
            with self._lock:
                self._runs[run_id] = update

        threading.Thread(target=work, daemon=True).start()
        return entry

    def get(self, run_id: str):
        with self._lock:
            return self._runs.get(run_id)


RUNS = RunRegistry()


def run_action(req: schemas.RunRequest) -> schemas.RunResponse:
    if req.wait:
        summary = _run_sync(req)
        return schemas.RunResponse(run_id=uuid.uuid4().hex[:12], state="done",
                                   result=summary)
    return RUNS.submit(req)


def report_action(req: schemas.ReportRequest) -> schemas.ReportResponse:
    trace_path = os.path.join(req.rundir, "trace.tsv")
    stats = aggregate_stats(trace_path)
    out_dir = req.out_dir or os.path.join(req.rundir, "report")
    paths = render_provenance_report(stats, trace_path, out_dir)
    return schemas.ReportResponse(stats_csv=paths["csv"], html=paths["html"],
                                  processes=[s.process for s in stats])


def demo_action(req: schemas.DemoRequest) -> schemas.DemoResponse:
    out = run_demo(req.formulation, req.workdir, seed=req.seed,
                   max_parallel=req.max_parallel, resume=req.resume,
                   history_days=req.history_days, generate_only=req.generate_only)
    run_summary = None
    if "run" in out:
        summary = dict(out["run"])
        summary.pop("outputs", None)
        run_summary = schemas.RunSummary(**summary)
    return schemas.DemoResponse(
        workflow=out["workflow"], workdir=out["workdir"],
        plan=out.get("plan"), run=run_summary,
        results=out.get("results", []), report=out.get("report", {}))


def contracts_action() -> schemas.ContractsResponse:
    registry = default_registry()
    return schemas.ContractsResponse(contracts=[
        schemas.ContractModel(op_id=c.op_id, version=c.version,
                              inputs=dict(c.inputs), outputs=dict(c.outputs),
                              emits={k: str(v) for k, v in c.emits.items()})
        for c in registry.contracts()])
