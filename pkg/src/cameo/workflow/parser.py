"""Parse and serialize workflow documents (JSON, schema_version 1).

Parsing enforces structural schema rules (known keys, unique names, known
operators and semantic types).  Cross-reference and contract checks are
the validator's job.
"""

import json

from ..errors import WorkflowSchemaError, WorkflowSyntaxError
from ..registry import parse_type
from .model import (
    CHANNEL_OPS, FILE_FORMATS, SOURCE_TYPES,
    ChannelDef, ChannelOp, ProcessDef, SourceDef, WorkflowSpec,
)

_TOP_KEYS = {"schema_version", "name", "params", "channels", "processes"}
_CHANNEL_KEYS = {"name", "source", "ops"}
_PROCESS_KEYS = {"name", "kind", "inputs", "outputs", "retries", "tag", "emits"}

_SCALAR = (str, int, float, bool)


def _require(cond, message):
    if not cond:
        raise WorkflowSchemaError(message)


def _check_keys(obj, allowed, context):
    unknown = set(obj) - allowed
    _require(not unknown, f"unknown key(s) {sorted(unknown)} in {context}")


def _parse_source(obj, context) -> SourceDef:
    _require(isinstance(obj, dict), f"{context}: source must be an object")
    stype = obj.get("type")
    _require(stype in SOURCE_TYPES, f"{context}: unknown source type {stype!r}")
    if stype == "values":
        _check_keys(obj, {"type", "items"}, context)
        items = obj.get("items", [])
        _require(isinstance(items, list), f"{context}: values source needs an item list")
        return SourceDef(type="values", items=tuple(items))
    if stype == "file":
        _check_keys(obj, {"type", "path", "format"}, context)
        path = obj.get("path")
        _require(isinstance(path, str) and path, f"{context}: file source needs a path")
        fmt = obj.get("format")
        if fmt is not None:
            _require(fmt in FILE_FORMATS, f"{context}: unknown file format {fmt!r}")
        return SourceDef(type="file", path=path, format=fmt)
    _check_keys(obj, {"type", "process", "port"}, context)
    proc, port = obj.get("process"), obj.get("port")
    _require(isinstance(proc, str) and proc, f"{context}: output source needs a process")
    _require(isinstance(port, str) and port, f"{context}: output source needs a port")
    return SourceDef(type="output", process=proc, port=port)


def _parse_ops(raw, context):
    _require(isinstance(raw, list), f"{context}: ops must be a list")
    ops = []
    for i, entry in enumerate(raw):
        where = f"{context}.ops[{i}]"
        _require(isinstance(entry, dict), f"{where}: operator must be an object")
        name = entry.get("op")
        _require(name in CHANNEL_OPS, f"{where}: unknown channel operator {name!r}")
        if name == "cross":
            _check_keys(entry, {"op", "with"}, where)
            other = entry.get("with")
            _require(isinstance(other, str) and other,
                     f"{where}: cross requires a 'with' channel")
            ops.append(ChannelOp("cross", with_channel=other))
        else:
            _check_keys(entry, {"op"}, where)
            ops.append(ChannelOp(name))
    return tuple(ops)


def _parse_channel(obj, index) -> ChannelDef:
    context = f"channels[{index}]"
    _require(isinstance(obj, dict), f"{context}: must be an object")
    _check_keys(obj, _CHANNEL_KEYS, context)
    name = obj.get("name")
    _require(isinstance(name, str) and name, f"{context}: channel needs a non-empty name")
    source = _parse_source(obj.get("source"), f"channel {name!r}")
    ops = _parse_ops(obj.get("ops", []), f"channel {name!r}")
    return ChannelDef(name=name, source=source, ops=ops)


def _parse_process(obj, index) -> ProcessDef:
    context = f"processes[{index}]"
    _require(isinstance(obj, dict), f"{context}: must be an object")
    _check_keys(obj, _PROCESS_KEYS, context)
    name = obj.get("name")
    _require(isinstance(name, str) and name, f"{context}: process needs a non-empty name")

    kind = obj.get("kind")
    _require(isinstance(kind, dict) and len(kind) == 1 and next(iter(kind)) in ("builtin", "exec"),
             f"process {name!r}: kind must be {{'builtin': op}} or {{'exec': command}}")
    builtin = kind.get("builtin")
    command = kind.get("exec")
    _require(isinstance(builtin or command, str) and (builtin or command),
             f"process {name!r}: kind value must be a non-empty string")

    inputs = obj.get("inputs", {})
    _require(isinstance(inputs, dict), f"process {name!r}: inputs must be a port->channel map")
    for port, channel in inputs.items():
        _require(isinstance(channel, str) and channel,
                 f"process {name!r}: input port {port!r} must name a channel")

    outputs = obj.get("outputs", {})
    _require(isinstance(outputs, dict), f"process {name!r}: outputs must be a port->type map")
    for port, type_name in outputs.items():
        _require(isinstance(type_name, str), f"process {name!r}: output {port!r} needs a type name")
        try:
            parse_type(type_name)
        except WorkflowSchemaError as exc:
            raise WorkflowSchemaError(f"process {name!r}, output {port!r}: {exc}") from None

    retries = obj.get("retries", 0)
    _require(isinstance(retries, int) and not isinstance(retries, bool) and retries >= 0,
             f"process {name!r}: retries must be a non-negative integer")

    tag = obj.get("tag", "")
    _require(isinstance(tag, str), f"process {name!r}: tag must be a string")

    emits = obj.get("emits", {})
    _require(isinstance(emits, dict), f"process {name!r}: emits must be a port->param map")
    for port, value in emits.items():
        _require(port in outputs, f"process {name!r}: emits references unknown output port {port!r}")
        _require(isinstance(value, (str, int)) and not isinstance(value, bool),
                 f"process {name!r}: emits[{port!r}] must be a param name or integer")

    return ProcessDef(
        name=name, builtin=builtin, command=command,
        inputs=tuple(inputs.items()), outputs=tuple(outputs.items()),
        retries=retries, tag=tag, emits=tuple(emits.items()),
    )


def parse_workflow(text: str) -> WorkflowSpec:
    """Parse a workflow document into a WorkflowSpec.

    Raises WorkflowSyntaxError for malformed JSON (with position) and
    WorkflowSchemaError for schema violations.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WorkflowSyntaxError(exc.msg, line=exc.lineno, column=exc.colno) from None

    _require(isinstance(doc, dict), "workflow document must be a JSON object")
    _check_keys(doc, _TOP_KEYS, "workflow document")
    version = doc.get("schema_version")
    _require(version == 1, f"unsupported schema_version {version!r}")

    name = doc.get("name")
    _require(isinstance(name, str) and name, "workflow needs a non-empty name")

    params = doc.get("params", {})
    _require(isinstance(params, dict), "params must be an object")
    for key, value in params.items():
        ok = isinstance(value, _SCALAR) or (
            isinstance(value, list) and all(isinstance(v, _SCALAR) for v in value))
        _require(ok, f"param {key!r} must be a scalar or a list of scalars")

    raw_channels = doc.get("channels", [])
    _require(isinstance(raw_channels, list), "channels must be a list")
    channels = tuple(_parse_channel(c, i) for i, c in enumerate(raw_channels))

    raw_processes = doc.get("processes", [])
    _require(isinstance(raw_processes, list), "processes must be a list")
    processes = tuple(_parse_process(p, i) for i, p in enumerate(raw_processes))

    seen = {}
    for kind, item in [("channel", c) for c in channels] + [("process", p) for p in processes]:
        if item.name in seen:
            raise WorkflowSchemaError(
                f"duplicate {kind} name {item.name!r}" if seen[item.name] == kind
                else f"name {item.name!r} used for both a {seen[item.name]} and a {kind}")
        seen[item.name] = kind

    return WorkflowSpec(name=name, params=tuple(params.items()),
                        channels=channels, processes=processes)


def serialize_workflow(spec: WorkflowSpec) -> str:
    """Render a spec back to document text; parse(serialize(s)) == s."""
    return json.dumps(spec.to_dict(), indent=2, sort_keys=False) + "\n"


def load_workflow(path) -> WorkflowSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_workflow(fh.read())
