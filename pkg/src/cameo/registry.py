"""Builtin-operation registry: typed component contracts and dispatch.

Every builtin process kind names an operation id like ``design_ss@1``.  The
registry maps that id to a :class:`ComponentContract` (closed input/output
port schemas over the semantic type set) and a callable.  Contract versions
participate in cache keys, so bumping the version invalidates stale results.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

from .errors import WorkflowSchemaError

#: Closed set of base semantic types a port may carry.
BASE_TYPES = frozenset({
    "ScenarioSet", "ScenarioTree", "BatteryConfig", "WindFarmSite",
    "HistoricalRecord", "DesignResult", "FileRef", "Scalar",
})


def parse_type(name: str) -> tuple:
    """Parse a semantic type name into a normalized tree.

    Grammar: base | list<T> | tuple<T,T[,...]>.  Raises WorkflowSchemaError
    for anything outside the closed set.
    """
    name = name.strip()
    if name in BASE_TYPES:
        return ("base", name)
    if name.startswith("list<") and name.endswith(">"):
        return ("list", parse_type(name[5:-1]))
    if name.startswith("tuple<") and name.endswith(">"):
        inner, args, depth, start = name[6:-1], [], 0, 0
        for i, ch in enumerate(inner):
            if ch == "<":
                depth += 1
            elif ch == ">":
                depth -= 1
            elif ch == "," and depth == 0:
                args.append(inner[start:i])
                start = i + 1
        args.append(inner[start:])
        if len(args) < 2:
            raise WorkflowSchemaError(f"tuple type needs at least two members: {name!r}")
        return ("tuple",) + tuple(parse_type(a) for a in args)
    raise WorkflowSchemaError(f"unknown semantic type {name!r}")


def format_type(tree: tuple) -> str:
    kind = tree[0]
    if kind == "base":
        return tree[1]
    if kind == "list":
        return f"list<{format_type(tree[1])}>"
    return "tuple<" + ",".join(format_type(t) for t in tree[1:]) + ">"


@dataclass(frozen=True)
class ComponentContract:
    """Typed interface a builtin operation exports.

    Schemas are closed: a process binding ports not present here is a
    validation error.  `emits`, when set for an output port, names the
    workflow parameter (or a literal int) giving the port's per-task list
    multiplicity, so plans can count fanned-out tasks without executing.
    """

    op_id: str
    inputs: Dict[str, str]
    outputs: Dict[str, str]
    version: str = "1"
    emits: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for schema in (self.inputs, self.outputs):
            for port, type_name in schema.items():
                parse_type(type_name)  # raises on unknown names

    def to_dict(self) -> dict:
        return {
            "op_id": self.op_id,
            "version": self.version,
            "inputs": dict(self.inputs),
            "outputs": dict(self.outputs),
            "emits": dict(self.emits),
        }


class OperationRegistry:
    """Maps op ids to contracts and their in-process implementations."""

    def __init__(self):
        self._contracts: Dict[str, ComponentContract] = {}
        self._impls: Dict[str, Callable] = {}

    def register(self, contract: ComponentContract, impl: Optional[Callable] = None):
        if contract.op_id in self._contracts:
            raise WorkflowSchemaError(f"operation {contract.op_id!r} registered twice")
        self._contracts[contract.op_id] = contract
        if impl is not None:
            self._impls[contract.op_id] = impl
        return contract

    def contract(self, op_id: str) -> Optional[ComponentContract]:
        return self._contracts.get(op_id)

    def implementation(self, op_id: str) -> Optional[Callable]:
        return self._impls.get(op_id)

    def contracts(self):
        return [self._contracts[k] for k in sorted(self._contracts)]

    def __contains__(self, op_id: str) -> bool:
        return op_id in self._contracts
