"""Command-line client for the workflow service.

Runs against the in-process service layer by default; pass --server to
talk to a running instance over HTTP instead.  Exit codes: 0 success,
1 validation/run failure, 2 usage error.
"""

import argparse
import json
import sys

from .errors import CameoError, RunAbortedError
from .service import actions, schemas


def _remote(server, path, payload, model):
    import httpx
    response = httpx.post(server.rstrip("/") + path, json=payload, timeout=None)
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except json.JSONDecodeError:
            detail = response.text
        raise CameoError(f"server error {response.status_code}: {detail}")
    return model.model_validate(response.json())


def _call(server, path, req, model, local):
    if server:
        return _remote(server, path, req.model_dump(mode="json"), model)
    return local(req)


def cmd_validate(args) -> int:
    req = schemas.ValidateRequest(workflow_path=args.workflow)
    resp = _call(args.server, "/validate", req, schemas.ValidateResponse,
                 actions.validate_action)
    for f in resp.findings:
        where = f" [{f.where}]" if f.where else ""
        print(f"{f.severity}: {f.message}{where}")
    print(f"{resp.errors} error(s), {resp.warnings} warning(s)")
    return 0 if resp.ok else 1


def cmd_plan(args) -> int:
    req = schemas.PlanRequest(workflow_path=args.workflow,
                              params=_parse_params(args.param))
    resp = _call(args.server, "/plan", req, schemas.PlanResponse,
                 actions.plan_action)
    for process, count in resp.counts.items():
        print(f"{process}: {count}")
    print(f"total: {resp.total}")
    return 0


def cmd_run(args) -> int:
    req = schemas.RunRequest(
        workflow_path=args.workflow, max_parallel=args.max_parallel,
        resume=args.resume, workdir=args.workdir, seed=args.seed,
        params=_parse_params(args.param), wait=True)
    resp = _call(args.server, "/runs", req, schemas.RunResponse,
                 actions.run_action)
    result = resp.result
    if result is None:
        print(f"run {resp.run_id}: {resp.state} {resp.error or ''}".strip())
        return 1
    _print_run(result)
    return 0 if result.success else 1


def _print_run(result: schemas.RunSummary) -> None:
    states = ", ".join(f"{k}={v}" for k, v in sorted(result.state_counts.items()))
    print(f"workflow {result.workflow}: {states}")
    print(f"executed={result.executed} cached={result.cached} "
          f"failed={result.failed} skipped={result.skipped} "
          f"peak_parallel={result.peak_parallel} "
          f"elapsed_ms={result.elapsed_ms:.0f}")
    print(f"workdir: {result.workdir}")
    for warning in result.warnings:
        print(f"warning: {warning}")


def cmd_report(args) -> int:
    req = schemas.ReportRequest(rundir=args.rundir)
    resp = _call(args.server, "/report", req, schemas.ReportResponse,
                 actions.report_action)
    print(f"stats: {resp.stats_csv}")
    print(f"report: {resp.html}")
    return 0


def cmd_demo(args) -> int:
    req = schemas.DemoRequest(
        formulation=args.formulation, workdir=args.workdir, seed=args.seed,
        max_parallel=args.max_parallel, resume=args.resume,
        generate_only=args.generate_only, history_days=args.history_days)
    resp = _call(args.server, "/demo", req, schemas.DemoResponse,
                 actions.demo_action)
    print(f"workflow: {resp.workflow}")
    if resp.plan:
        for process, count in resp.plan.get("counts", {}).items():
            print(f"{process}: {count}")
    if resp.run is not None:
        _print_run(resp.run)
    for path in resp.results:
        print(f"result: {path}")
    if resp.report:
        print(f"report: {resp.report.get('html', '')}")
    if resp.run is not None and not resp.run.success:
        return 1
    return 0


def cmd_serve(args) -> int:
    import uvicorn
    from .service.app import app
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _parse_params(pairs):
    params = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise CameoError(f"bad --param {pair!r}, expected key=value")
        key, value = pair.split("=", 1)
        try:
            params[key] = json.loads(value)
        except json.JSONDecodeError:
            params[key] = value
    return params


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cameo",
        description="Co-design workflow engine: validate, plan and run "
                    "parameter-sweep pipelines.")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a workflow against the registry")
    p.add_argument("workflow")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plan", help="dry-run task counts for a workflow")
    p.add_argument("workflow")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("run", help="execute a workflow")
    p.add_argument("workflow")
    p.add_argument("--max-parallel", type=int, default=4)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--workdir", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="provenance report for a finished run")
    p.add_argument("rundir")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("demo", help="generate synthetic data and run a pipeline")
    p.add_argument("formulation", choices=["a", "b"])
    p.add_argument("--workdir", default="demo-run")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-parallel", type=int, default=8)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--generate-only", action="store_true")
    p.add_argument("--history-days", type=int, default=60)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8712)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RunAbortedError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 1
    except (CameoError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
