"""Workflow validation against the operation registry's contracts.

Findings are data, not exceptions: the report lists every problem found
(severity error/warning) so a user can fix a document in one pass.
"""

import re

from ..registry import OperationRegistry, format_type, parse_type
from .model import FILE_FORMATS, ValidationReport, WorkflowSpec

_TEMPLATE_TOKEN = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")

_IN_PROGRESS = object()


def _channel_item_type(spec, channel, report, seen):
    """Infer the semantic type of one item of `channel`, or None on error."""
    if channel.name in seen:
        cached = seen[channel.name]
        if cached is _IN_PROGRESS:
            report.add("error", "channel-cycle",
                       f"channel {channel.name!r} participates in a reference cycle",
                       where=f"channel:{channel.name}")
            return None
        return cached
    seen[channel.name] = _IN_PROGRESS
    result = _infer_item_type(spec, channel, report, seen)
    seen[channel.name] = result
    return result


def _infer_item_type(spec, channel, report, seen):
    src = channel.source
    if src.type == "values":
        current = parse_type("Scalar")
    elif src.type == "file":
        current = parse_type(FILE_FORMATS.get(src.format, "FileRef"))
    else:
        producer = spec.process(src.process)
        if producer is None:
            report.add("error", "unknown-process",
                       f"channel {channel.name!r} reads from undeclared process {src.process!r}",
                       where=f"channel:{channel.name}")
            return None
        port_type = producer.output_map.get(src.port)
        if port_type is None:
            report.add("error", "unknown-port",
                       f"channel {channel.name!r} reads missing port {src.process}.{src.port}",
                       where=f"channel:{channel.name}")
            return None
        current = parse_type(port_type)

    for op in channel.ops:
        if current is None:
            return None
        if op.op == "flatten":
            if current[0] != "list":
                report.add("error", "flatten-non-list",
                           f"channel {channel.name!r} flattens non-list items "
                           f"({format_type(current)})", where=f"channel:{channel.name}")
                return None
            current = current[1]
        elif op.op == "collect":
            current = ("list", current)
        elif op.op == "cross":
            other = spec.channel(op.with_channel)
            if other is None:
                report.add("error", "unknown-channel",
                           f"channel {channel.name!r} crosses undeclared channel "
                           f"{op.with_channel!r}", where=f"channel:{channel.name}")
                return None
            other_type = _channel_item_type(spec, other, report, seen)
            if other_type is None:
                return None
            current = ("tuple", current, other_type)

    return current


def validate_workflow(spec: WorkflowSpec, registry: OperationRegistry) -> ValidationReport:
    """Check contract bindings, channel references and port types."""
    report = ValidationReport()
    params = spec.param_map
    type_cache = {}

    consumed = set()
    for proc in spec.processes:
        where = f"process:{proc.name}"

        if proc.builtin is not None:
            contract = registry.contract(proc.builtin)
            if contract is None:
                report.add("error", "unknown-operation",
                           f"unknown operation {proc.builtin!r}", where=where)
                contract = None
        else:
            contract = None
            tokens = set(_TEMPLATE_TOKEN.findall(proc.command or ""))
            for token in tokens:
                if token not in proc.input_map and token not in params:
                    report.add("error", "unknown-template-token",
                               f"exec command references {token!r}, which is neither "
                               f"an input port nor a param", where=where)
            for port, type_name in proc.outputs:
                if type_name != "FileRef":
                    report.add("error", "exec-output-type",
                               f"exec output port {port!r} must be FileRef, got {type_name!r}",
                               where=where)

        # channel references resolve, and the item type matches the port
        for port, channel_name in proc.inputs:
            channel = spec.channel(channel_name)
            if channel is None:
                report.add("error", "unknown-channel",
                           f"input port {port!r} bound to undeclared channel "
                           f"{channel_name!r}", where=where)
                continue
            consumed.add(channel_name)
            item_type = _channel_item_type(spec, channel, report, type_cache)
            if contract is not None:
                declared = contract.inputs.get(port)
                if declared is None:
                    report.add("error", "extra-port",
                               f"port {port!r} not accepted by {contract.op_id}", where=where)
                elif item_type is not None and parse_type(declared) != item_type:
                    report.add("error", "port-type-mismatch",
                               f"port {port!r} expects {declared}, channel "
                               f"{channel_name!r} carries {format_type(item_type)}",
                               where=where)

        if contract is not None:
            for port in contract.inputs:
                if port not in proc.input_map:
                    report.add("error", "unbound-port",
                               f"input port {port!r} of {contract.op_id} left unbound",
                               where=where)
            for port, type_name in proc.outputs:
                declared = contract.outputs.get(port)
                if declared is None:
                    report.add("error", "extra-port",
                               f"output port {port!r} not exported by {contract.op_id}",
                               where=where)
                elif parse_type(declared) != parse_type(type_name):
                    report.add("error", "port-type-mismatch",
                               f"output port {port!r} declared {type_name}, contract "
                               f"says {declared}", where=where)
            for port in contract.outputs:
                if port not in proc.output_map:
                    report.add("error", "unbound-port",
                               f"output port {port!r} of {contract.op_id} not declared",
                               where=where)

        for port, value in proc.emits:
            if isinstance(value, str) and value not in params:
                report.add("error", "unknown-param",
                           f"emits[{port!r}] references missing param {value!r}", where=where)

    for channel in spec.channels:
        deps = []
        if channel.source.type == "output" and spec.process(channel.source.process) is None:
            pass  # already reported via type inference when consumed
        _channel_item_type(spec, channel, report, type_cache)
        for op in channel.ops:
            if op.op == "cross" and spec.channel(op.with_channel) is not None:
                deps.append(op.with_channel)
        consumed.update(deps)

    for channel in spec.channels:
        if channel.name not in consumed:
            report.add("warning", "unused-channel",
                       f"channel {channel.name!r} is never consumed",
                       where=f"channel:{channel.name}")

    # de-duplicate findings produced by repeated type inference
    unique, out = set(), []
    for f in report.findings:
        key = (f.severity, f.code, f.message, f.where)
        if key not in unique:
            unique.add(key)
            out.append(f)
    report.findings = out
    return report
