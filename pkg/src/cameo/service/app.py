"""FastAPI application exposing the workflow engine."""

from fastapi import FastAPI, HTTPException

from ..errors import CameoError
from . import actions, schemas


def create_app() -> FastAPI:
    app = FastAPI(title="cameo", description="Co-design workflow engine",
                  version="0.1.0")

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/contracts", response_model=schemas.ContractsResponse)
    def contracts():
        return actions.contracts_action()

    @app.post("/validate", response_model=schemas.ValidateResponse)
    def validate(req: schemas.ValidateRequest):
        try:
            return actions.validate_action(req)
        except CameoError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/plan", response_model=schemas.PlanResponse)
    def plan(req: schemas.PlanRequest):
        try:
            return actions.plan_action(req)
        except (CameoError, FileNotFoundError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/runs", response_model=schemas.RunResponse)
    def runs(req: schemas.RunRequest):
        try:
            return actions.run_action(req)
        except (CameoError, FileNotFoundError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/runs/{run_id}", response_model=schemas.RunResponse)
    def run_status(run_id: str):
        entry = actions.RUNS.get(run_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")
        return entry

    @app.post("/report", response_model=schemas.ReportResponse)
    def report(req: schemas.ReportRequest):
        try:
            return actions.report_action(req)
        except (CameoError, FileNotFoundError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/demo", response_model=schemas.DemoResponse)
    def demo(req: schemas.DemoRequest):
        try:
            return actions.demo_action(req)
        except (CameoError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    return app


app = create_app()
