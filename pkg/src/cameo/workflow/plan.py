"""Dry-run sweep planning: exact task counts without executing anything.

Channels backed by values/files are materialized; channels fed by process
outputs contribute their statically declared multiplicity (`emits`).  The
plan is side-effect free and deterministic.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..errors import UnresolvedCardinalityError, WorkflowSchemaError
from ..registry import OperationRegistry
from .channels import ChannelItem, apply_channel_op, resolve_source
from .graph import ProcessGraph
from .model import WorkflowSpec


@dataclass
class PlannedTask:
    process: str
    ordinal: int
    payload: Optional[dict] = None      # port -> payload, when statically known


@dataclass
class SweepPlan:
    counts: Dict[str, int]
    tasks: List[PlannedTask] = field(default_factory=list)
    channel_counts: Dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_dict(self) -> dict:
        return {"counts": dict(self.counts), "total": self.total,
                "channel_counts": dict(self.channel_counts)}


@dataclass
class _ChannelInfo:
    count: int
    items: Optional[List[ChannelItem]] = None   # None when payloads need execution
    item_list_len: Optional[int] = None         # uniform list length (for flatten)


def resolve_sources(spec: WorkflowSpec, base_dir, params: Optional[dict] = None) -> dict:
    """Materialize every values/file channel source. Returns name -> items."""
    params = dict(spec.param_map, **(params or {}))
    out = {}
    for channel in spec.channels:
        items = resolve_source(channel.source, base_dir, params)
        if items is not None:
            out[channel.name] = items
    return out


def _emits_value(value, params, process, port):
    if isinstance(value, int):
        return value
    if value in params and isinstance(params[value], int):
        return params[value]
    raise UnresolvedCardinalityError(
        f"process {process!r} port {port!r}: emits param {value!r} is not an integer param")


def bind_task_payloads(inputs: Dict[str, List[ChannelItem]], count: int) -> List[dict]:
    """Zip input channels into per-task port->item bindings.

    Channels holding a single item broadcast to every task; all others
    must agree on `count`.
    """
    bindings = []
    for ordinal in range(count):
        bound = {}
        for port, items in inputs.items():
            bound[port] = items[0] if len(items) == 1 and count > 1 else items[ordinal]
        bindings.append(bound)
    return bindings


def task_count_for(inputs: Dict[str, List[ChannelItem]]) -> int:
    counts = {len(items) for items in inputs.values()}
    non_unit = counts - {1}
    if len(non_unit) > 1:
        raise WorkflowSchemaError(f"input channel cardinalities disagree: {sorted(counts)}")
    return max(counts) if counts else 1


def plan_tasks(graph: ProcessGraph, sources: Dict[str, List[ChannelItem]],
               registry: OperationRegistry, params: Optional[dict] = None) -> SweepPlan:
    """Compute exact per-process task counts and the static task list.

    `sources` maps the names of values/file channels to their resolved
    items (see resolve_sources).  Raises UnresolvedCardinalityError when a
    fan-out cannot be computed without executing a task.
    """
    spec = graph.spec
    params = dict(spec.param_map, **(params or {}))
    channel_info: Dict[str, _ChannelInfo] = {}
    task_counts: Dict[str, int] = {}

    def resolve_channel(name, stack=()):
        if name in channel_info:
            return channel_info[name]
        if name in stack:
            raise WorkflowSchemaError(f"channel {name!r} depends on itself")
        channel = spec.channel(name)
        if channel is None:
            raise WorkflowSchemaError(f"undeclared channel {name!r}")

        src = channel.source
        if src.type in ("values", "file"):
            items = sources.get(name, [])
            info = _ChannelInfo(count=len(items), items=list(items))
        else:
            producer = spec.process(src.process)
            if producer is None or src.process not in task_counts:
                raise WorkflowSchemaError(
                    f"channel {name!r} reads from unplanned process {src.process!r}")
            info = _ChannelInfo(count=task_counts[src.process])
            emits = producer.emits_map.get(src.port)
            if emits is not None:
                info.item_list_len = _emits_value(emits, params, src.process, src.port)

        for op in channel.ops:
            if info.items is not None:
                other = None
                if op.op == "cross":
                    other = resolve_channel(op.with_channel, stack + (name,))
                    if other.items is None:
                        info = _ChannelInfo(count=info.count * other.count)
                        continue
                    other = other.items
                info.items = apply_channel_op(info.items, op, other)
                info.count = len(info.items)
            else:
                if op.op == "flatten":
                    if info.item_list_len is None:
                        raise UnresolvedCardinalityError(
                            f"channel {name!r}: flatten fan-out is not statically declared "
                            f"(missing emits)")
                    info.count *= info.item_list_len
                    info.item_list_len = None
                elif op.op == "collect":
                    info.count = 1
                elif op.op == "cross":
                    other = resolve_channel(op.with_channel, stack + (name,))
                    info.count *= other.count
                    info.item_list_len = None

        channel_info[name] = info
        return info

    plan = SweepPlan(counts={})
    for name in graph.topo_order:
        proc = spec.process(name)
        port_infos = {port: resolve_channel(ch) for port, ch in proc.inputs}

        counts = {p: i.count for p, i in port_infos.items()}
        non_unit = set(counts.values()) - {1}
        if len(non_unit) > 1:
            raise WorkflowSchemaError(
                f"process {name!r}: input channel cardinalities disagree: {counts}")
        count = max(counts.values()) if counts else 1
        task_counts[name] = count
        plan.counts[name] = count

        if all(info.items is not None for info in port_infos.values()):
            items = {p: info.items for p, info in port_infos.items()}
            for ordinal, bound in enumerate(bind_task_payloads(items, count)):
                plan.tasks.append(PlannedTask(
                    process=name, ordinal=ordinal,
                    payload={port: item.payload for port, item in bound.items()}))
        else:
            plan.tasks.extend(PlannedTask(process=name, ordinal=i) for i in range(count))

    plan.channel_counts = {n: i.count for n, i in channel_info.items()}
    return plan
