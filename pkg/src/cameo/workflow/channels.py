"""Channel semantics: item streams, operators, and source resolution.

A channel is a finite ordered sequence of payload items.  Items carry the
set of task ids that produced them so failures can poison exactly the
downstream work that depends on them.
"""

import glob
import os
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from ..errors import OperatorArityError, WorkflowSchemaError
from .model import ChannelDef, ChannelOp, SourceDef


@dataclass(frozen=True)
class ChannelItem:
    payload: object
    origins: frozenset = field(default_factory=frozenset)   # producing task ids
    poisoned: bool = False                                   # upstream task failed/skipped

    @staticmethod
    def wrap(payload) -> "ChannelItem":
        return ChannelItem(payload=payload)


def _as_items(seq) -> List[ChannelItem]:
    return [x if isinstance(x, ChannelItem) else ChannelItem.wrap(x) for x in seq]


def apply_channel_op(items: Sequence, op, other: Optional[Sequence] = None) -> List[ChannelItem]:
    """Apply one channel operator to an item sequence.

    cross: left-major Cartesian product with `other` (pair payloads);
    flatten: splice list-valued payloads into the stream;
    collect: single item holding every payload in order.
    Raw payloads are accepted and wrapped.
    """
    name = op.op if isinstance(op, ChannelOp) else op
    items = _as_items(items)

    if name == "cross":
        if other is None:
            raise OperatorArityError("cross requires a second operand channel")
        other = _as_items(other)
        return [
            ChannelItem(payload=[a.payload, b.payload],
                        origins=a.origins | b.origins,
                        poisoned=a.poisoned or b.poisoned)
            for a in items for b in other
        ]

    if name == "flatten":
        out = []
        for item in items:
            if item.poisoned and not isinstance(item.payload, list):
                out.append(item)
                continue
            if not isinstance(item.payload, list):
                raise OperatorArityError("flatten requires list-valued items")
            out.extend(ChannelItem(payload=p, origins=item.origins, poisoned=item.poisoned)
                       for p in item.payload)
        return out

    if name == "collect":
        return [ChannelItem(
            payload=[i.payload for i in items],
            origins=frozenset().union(*(i.origins for i in items)) if items else frozenset(),
            poisoned=any(i.poisoned for i in items),
        )]

    raise OperatorArityError(f"unknown channel operator {name!r}")


def interpolate(template: str, params: dict) -> str:
    """Substitute {param} placeholders; unknown names stay verbatim."""
    out, i = [], 0
    while i < len(template):
        ch = template[i]
        if ch == "{":
            end = template.find("}", i)
            if end > i:
                key = template[i + 1:end]
                if key in params:
                    out.append(str(params[key]))
                    i = end + 1
                    continue
        out.append(ch)
        i += 1
    return "".join(out)


def resolve_source(source: SourceDef, base_dir, params: dict) -> Optional[List[ChannelItem]]:
    """Materialize a values/file source; output sources return None.

    File sources glob relative to `base_dir` (sorted matches).  A format
    turns the matched file(s) into typed payload items; without one each
    match becomes a FileRef payload.
    """
    if source.type == "values":
        return [ChannelItem.wrap(v) for v in source.items]
    if source.type == "output":
        return None

    pattern = interpolate(source.path, params)
    if not os.path.isabs(pattern):
        pattern = os.path.join(str(base_dir), pattern)
    matches = sorted(glob.glob(pattern))

    if source.format is None:
        return [ChannelItem.wrap({"path": m}) for m in matches]

    if source.format == "sites":
        from ..data.sites import load_sites
        items = []
        for m in matches:
            items.extend(ChannelItem.wrap(site.to_dict()) for site in load_sites(m))
        return items
    if source.format == "battery_catalog":
        from ..data.batteries import load_battery_catalog
        items = []
        for m in matches:
            items.extend(ChannelItem.wrap(cfg.to_dict()) for cfg in load_battery_catalog(m))
        return items
    raise WorkflowSchemaError(f"unknown file format {source.format!r}")


def channel_dependencies(channel: ChannelDef) -> dict:
    """Names this channel depends on: {'processes': [...], 'channels': [...]}."""
    procs, chans = [], []
    if channel.source.type == "output":
        procs.append(channel.source.process)
    for op in channel.ops:
        if op.op == "cross":
            chans.append(op.with_channel)
    return {"processes": procs, "channels": chans}
