"""Task instances, outcomes, and tag rendering."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

from ..workflow.channels import interpolate


class TaskState(Enum):
    PENDING = "Pending"
    READY = "Ready"
    RUNNING = "Running"
    RETRY_WAIT = "Retrying"
    SUCCEEDED = "Succeeded"
    FAILED = "Failed"
    FAILED_PERMANENT = "FailedPermanent"
    SKIPPED = "Skipped"
    CACHED = "Cached"


TERMINAL_STATES = {TaskState.SUCCEEDED, TaskState.FAILED_PERMANENT,
                   TaskState.SKIPPED, TaskState.CACHED}


@dataclass(frozen=True)
class TaskInstance:
    task_id: str
    process: str
    ordinal: int
    payload: dict                      # port -> resolved payload
    tag: str = ""
    attempt: int = 1
    upstream: frozenset = field(default_factory=frozenset)   # producing task ids


@dataclass
class TaskOutcome:
    status: str                        # Succeeded | Failed | Cached
    outputs: Dict[str, object] = field(default_factory=dict)
    error: str = ""
    workdir: str = ""
    duration_ms: float = 0.0
    cpu_fraction: Optional[float] = None
    peak_rss_bytes: Optional[int] = None


def _flatten_scalars(value, out):
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (str, int, float, bool)) and k not in out:
                out[k] = v
        for v in value.values():
            _flatten_scalars(v, out)
    elif isinstance(value, list):
        for v in value:
            _flatten_scalars(v, out)


def render_tag(template: str, payload: dict, params: dict, process: str,
               ordinal: int) -> str:
    """Fill {placeholders} from payload scalar fields, params and builtins.

    Payload keys are collected breadth-first, first occurrence wins;
    unknown placeholders are left verbatim.
    """
    if not template:
        return f"{process}-{ordinal}"
    context = {"process": process, "ordinal": ordinal}
    scalars = {}
    _flatten_scalars(payload, scalars)
    for k, v in scalars.items():
        context.setdefault(k, v)
    for k, v in params.items():
        context.setdefault(k, v)
    return interpolate(template, context)
