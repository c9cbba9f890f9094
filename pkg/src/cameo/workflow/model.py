"""Declarative workflow data model.

A workflow document declares parameters, channels (ordered payload
streams) and processes (builtin operations or local commands) wired
together through named ports.  Instances here are immutable; parsing and
validation live in sibling modules.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

SOURCE_TYPES = ("values", "file", "output")
CHANNEL_OPS = ("cross", "flatten", "collect")

#: Loaders a file-backed channel may name to expand a data file into
#: typed payload items (one item per record).  Plain file sources expand
#: to one FileRef item per glob match.
FILE_FORMATS = {
    "sites": "WindFarmSite",
    "battery_catalog": "BatteryConfig",
}


@dataclass(frozen=True)
class SourceDef:
    """Where a channel's items come from."""

    type: str                              # values | file | output
    items: Optional[Tuple] = None          # values: the literal payloads
    path: Optional[str] = None             # file: glob, may interpolate {params}
    format: Optional[str] = None           # file: optional loader name
    process: Optional[str] = None          # output: producing process
    port: Optional[str] = None             # output: producing port

    def to_dict(self) -> dict:
        if self.type == "values":
            return {"type": "values", "items": list(self.items)}
        if self.type == "file":
            d = {"type": "file", "path": self.path}
            if self.format:
                d["format"] = self.format
            return d
        return {"type": "output", "process": self.process, "port": self.port}


@dataclass(frozen=True)
class ChannelOp:
    """One operator in a channel's transformation chain."""

    op: str                                # cross | flatten | collect
    with_channel: Optional[str] = None     # cross only

    def to_dict(self) -> dict:
        if self.op == "cross":
            return {"op": "cross", "with": self.with_channel}
        return {"op": self.op}


@dataclass(frozen=True)
class ChannelDef:
    name: str
    source: SourceDef
    ops: Tuple[ChannelOp, ...] = ()

    def to_dict(self) -> dict:
        return {"name": self.name, "source": self.source.to_dict(),
                "ops": [op.to_dict() for op in self.ops]}


@dataclass(frozen=True)
class ProcessDef:
    """One process: a builtin op id or an exec command template.

    `emits` declares static fan-out for list-valued output ports (port ->
    workflow param name or literal int) so plans can count downstream
    tasks without running anything.
    """

    name: str
    builtin: Optional[str] = None
    command: Optional[str] = None
    inputs: Tuple[Tuple[str, str], ...] = ()    # (port, channel) in declared order
    outputs: Tuple[Tuple[str, str], ...] = ()   # (port, semantic type)
    retries: int = 0
    tag: str = ""
    emits: Tuple[Tuple[str, object], ...] = ()  # (port, param-name-or-int)

    @property
    def input_map(self) -> dict:
        return dict(self.inputs)

    @property
    def output_map(self) -> dict:
        return dict(self.outputs)

    @property
    def emits_map(self) -> dict:
        return dict(self.emits)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "kind": {"builtin": self.builtin} if self.builtin else {"exec": self.command},
            "inputs": dict(self.inputs),
            "outputs": dict(self.outputs),
            "retries": self.retries,
            "tag": self.tag,
        }
        if self.emits:
            d["emits"] = {k: v for k, v in self.emits}
        return d


@dataclass(frozen=True)
class WorkflowSpec:
    name: str
    params: Tuple[Tuple[str, object], ...] = ()
    channels: Tuple[ChannelDef, ...] = ()
    processes: Tuple[ProcessDef, ...] = ()

    @property
    def param_map(self) -> dict:
        return dict(self.params)

    def channel(self, name: str) -> Optional[ChannelDef]:
        for ch in self.channels:
            if ch.name == name:
                return ch
        return None

    def process(self, name: str) -> Optional[ProcessDef]:
        for p in self.processes:
            if p.name == name:
                return p
        return None

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "name": self.name,
            "params": dict(self.params),
            "channels": [c.to_dict() for c in self.channels],
            "processes": [p.to_dict() for p in self.processes],
        }


@dataclass(frozen=True)
class Finding:
    """One validation finding; `severity` is 'error' or 'warning'."""

    severity: str
    code: str
    message: str
    where: str = ""

    def to_dict(self) -> dict:
        return {"severity": self.severity, "code": self.code,
                "message": self.message, "where": self.where}


@dataclass
class ValidationReport:
    findings: list = field(default_factory=list)

    def add(self, severity, code, message, where=""):
        self.findings.append(Finding(severity, code, message, where))

    @property
    def errors(self):
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self):
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {"ok": self.ok, "findings": [f.to_dict() for f in self.findings]}
