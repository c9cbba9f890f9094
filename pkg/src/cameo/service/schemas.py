"""Request/response models for the co-design workflow service."""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class FindingModel(BaseModel):
    severity: str
    code: str
    message: str
    where: str = ""


class ValidateRequest(BaseModel):
    workflow_path: Optional[str] = None
    document: Optional[str] = None


class ValidateResponse(BaseModel):
    ok: bool
    errors: int
    warnings: int
    findings: List[FindingModel]


class PlanRequest(BaseModel):
    workflow_path: str
    params: Dict[str, object] = Field(default_factory=dict)


class PlanResponse(BaseModel):
    counts: Dict[str, int]
    total: int
    channel_counts: Dict[str, int]


class RunRequest(BaseModel):
    workflow_path: str
    max_parallel: int = 4
    resume: bool = False
    workdir: Optional[str] = None
    seed: Optional[int] = None
    params: Dict[str, object] = Field(default_factory=dict)
    wait: bool = True


class RunSummary(BaseModel):
    workflow: str
    workdir: str
    state_counts: Dict[str, int]
    process_counts: Dict[str, int]
    executed: int
    cached: int
    failed: int
    skipped: int
    peak_parallel: int
    elapsed_ms: float
    trace_path: str
    scheduler_log_path: str
    success: bool
    warnings: List[str] = Field(default_factory=list)


class RunResponse(BaseModel):
    run_id: str
    state: str                        # running | done | aborted | error
    result: Optional[RunSummary] = None
    error: Optional[str] = None


class ReportRequest(BaseModel):
    rundir: str
    out_dir: Optional[str] = None


class ReportResponse(BaseModel):
    stats_csv: str
    html: str
    processes: List[str]


class DemoRequest(BaseModel):
    formulation: str
    workdir: str
    seed: int = 42
    max_parallel: int = 8
    resume: bool = False
    generate_only: bool = False
    history_days: int = 60


class DemoResponse(BaseModel):
    workflow: str
    workdir: str
    plan: Optional[Dict[str, object]] = None
    run: Optional[RunSummary] = None
    results: List[str] = Field(default_factory=list)
    report: Dict[str, str] = Field(default_factory=dict)


class ContractModel(BaseModel):
    op_id: str
    version: str
    inputs: Dict[str, str]
    outputs: Dict[str, str]
    emits: Dict[str, str] = Field(default_factory=dict)


class ContractsResponse(BaseModel):
    contracts: List[ContractModel]
