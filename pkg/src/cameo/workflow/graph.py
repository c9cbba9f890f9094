"""Process DAG construction with a deterministic topological order."""

from dataclasses import dataclass
from typing import Tuple

from ..errors import CycleError
from .model import WorkflowSpec
from .channels import channel_dependencies


@dataclass(frozen=True)
class Edge:
    """One bound input port and the processes that feed it (via its channel)."""

    channel: str
    producers: Tuple[str, ...]
    consumer: str
    port: str


@dataclass(frozen=True)
class ProcessGraph:
    spec: WorkflowSpec
    edges: Tuple[Edge, ...]
    topo_order: Tuple[str, ...]

    def upstream(self, process: str) -> Tuple[str, ...]:
        seen, out = set(), []
        for e in self.edges:
            if e.consumer == process:
                for p in e.producers:
                    if p not in seen:
                        seen.add(p)
                        out.append(p)
        return tuple(out)


def _transitive_producers(spec: WorkflowSpec, channel_name: str, stack=()) -> tuple:
    """Processes whose outputs flow (possibly via cross refs) into a channel."""
    if channel_name in stack:
        return ()
    channel = spec.channel(channel_name)
    if channel is None:
        return ()
    deps = channel_dependencies(channel)
    out = list(deps["processes"])
    for other in deps["channels"]:
        for p in _transitive_producers(spec, other, stack + (channel_name,)):
            if p not in out:
                out.append(p)
    return tuple(out)


def build_dag(spec: WorkflowSpec) -> ProcessGraph:
    """Build the process dependency graph.

    One edge per bound input port; topological order is Kahn's algorithm
    with ties broken by process declaration order.  Raises CycleError
    naming the processes on a cycle.
    """
    edges = []
    for proc in spec.processes:
        for port, channel_name in proc.inputs:
            producers = _transitive_producers(spec, channel_name)
            edges.append(Edge(channel=channel_name, producers=producers,
                              consumer=proc.name, port=port))

    order_index = {p.name: i for i, p in enumerate(spec.processes)}
    preds = {p.name: set() for p in spec.processes}
    succs = {p.name: set() for p in spec.processes}
    for e in edges:
        for producer in e.producers:
            if producer in preds:
                preds[e.consumer].add(producer)
                succs[producer].add(e.consumer)

    remaining = dict(preds)
    topo = []
    ready = sorted((n for n, ps in remaining.items() if not ps), key=order_index.get)
    while ready:
        node = ready.pop(0)
        topo.append(node)
        del remaining[node]
        newly = []
        for succ in succs[node]:
            if succ in remaining:
                remaining[succ].discard(node)
                if not remaining[succ]:
                    newly.append(succ)
        if newly:
            ready = sorted(ready + newly, key=order_index.get)

    if remaining:
        raise CycleError(sorted(remaining, key=order_index.get))

    return ProcessGraph(spec=spec, edges=tuple(edges), topo_order=tuple(topo))
