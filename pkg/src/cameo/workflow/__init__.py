from .model import (
    ChannelDef, ChannelOp, Finding, ProcessDef, SourceDef,
    ValidationReport, WorkflowSpec,
)
from .parser import load_workflow, parse_workflow, serialize_workflow
from .validate import validate_workflow
from .graph import Edge, ProcessGraph, build_dag
from .channels import ChannelItem, apply_channel_op, resolve_source
from .plan import PlannedTask, SweepPlan, plan_tasks, resolve_sources

__all__ = [
    "ChannelDef", "ChannelOp", "Finding", "ProcessDef", "SourceDef",
    "ValidationReport", "WorkflowSpec",
    "load_workflow", "parse_workflow", "serialize_workflow",
    "validate_workflow", "Edge", "ProcessGraph", "build_dag",
    "ChannelItem", "apply_channel_op", "resolve_source",
    "PlannedTask", "SweepPlan", "plan_tasks", "resolve_sources",
]
