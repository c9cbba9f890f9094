"""Workflow run coordinator.

One coordinator thread owns the scheduler state machine (Pending -> Ready
-> Running -> Succeeded | Failed -> Retrying | FailedPermanent | Skipped |
Cached); workers execute tasks on a bounded pool and report back over a
queue.  Processes expand into task instances once every upstream process
feeding their input channels is terminal; failed ancestry poisons exactly
the dependent items, so unaffected sweep members still run.
"""

import json
import os
import queue
import random
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..errors import RunAbortedError, SerializationError
from ..registry import OperationRegistry
from ..workflow.channels import ChannelItem, apply_channel_op
from ..workflow.graph import ProcessGraph
from ..workflow.plan import bind_task_payloads, resolve_sources, task_count_for
from ..provenance.trace import TraceRecord, append_trace
from .cache import CacheStore, contract_cache_key
from .execute import execute_task
from .retry import RetryDecision, RetryPolicy, apply_retry_policy
from .task import TERMINAL_STATES, TaskInstance, TaskOutcome, TaskState, render_tag

WORKDIR_ENV = "CAMEO_WORKDIR"


@dataclass
class RunOptions:
    max_parallel: int = 4
    resume: bool = False
    workdir: Optional[str] = None
    seed: Optional[int] = None
    base_delay_ms: float = 200.0
    timeout_s: Optional[float] = None

    def __post_init__(self):
        if self.max_parallel < 1:
            raise ValueError("max_parallel must be >= 1")


@dataclass
class RunResult:
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
    warnings: List[str] = field(default_factory=list)
    outputs: Dict[str, list] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "workflow": self.workflow, "workdir": self.workdir,
            "state_counts": dict(self.state_counts),
            "process_counts": dict(self.process_counts),
            "executed": self.executed, "cached": self.cached,
            "failed": self.failed, "skipped": self.skipped,
            "peak_parallel": self.peak_parallel, "elapsed_ms": self.elapsed_ms,
            "trace_path": self.trace_path,
            "scheduler_log_path": self.scheduler_log_path,
            "success": self.success, "warnings": list(self.warnings),
        }


class _Task:
    __slots__ = ("inst", "proc", "state", "attempt", "key", "workdir",
                 "submit_ms", "start_ms", "complete_ms", "outcome", "wake_at")

    def __init__(self, inst, proc, key):
        self.inst = inst
        self.proc = proc
        self.key = key
        self.state = TaskState.PENDING
        self.attempt = 1
        self.workdir = ""
        self.submit_ms = _now_ms()
        self.start_ms = self.submit_ms
        self.complete_ms = self.submit_ms
        self.outcome: Optional[TaskOutcome] = None
        self.wake_at = 0.0


def _now_ms() -> int:
    return int(time.time() * 1000)


class _SchedulerLog:
    """Instrumented concurrency log: every dispatch/finish with the running count."""

    def __init__(self, path):
        self.path = path
        self.peak = 0
        self._fh = open(path, "w", encoding="utf-8")
        self._fh.write("t_ms\tevent\ttask_id\trunning_after\n")

    def event(self, event, task_id, running_after):
        self.peak = max(self.peak, running_after)
        self._fh.write(f"{_now_ms()}\t{event}\t{task_id}\t{running_after}\n")
        self._fh.flush()

    def close(self):
        self._fh.close()


def default_workdir(name: str) -> str:
    env = os.environ.get(WORKDIR_ENV)
    if env:
        return os.path.join(env, name)
    return os.path.join("cameo-runs", name)


def run_workflow(graph: ProcessGraph, registry: OperationRegistry,
                 options: RunOptions, params: Optional[dict] = None,
                 base_dir: str = ".") -> RunResult:
    """Execute every task of the graph; returns the run summary.

    On interrupt the partial on-disk state (cache entries, trace prefix)
    stays valid for a later --resume run; RunAbortedError is raised.
    """
    spec = graph.spec
    run_params = dict(spec.param_map)
    run_params.update(params or {})
    if options.seed is not None:
        run_params["seed"] = options.seed

    root = options.workdir or default_workdir(spec.name)
    os.makedirs(root, exist_ok=True)
    store = CacheStore(root)
    trace_path = os.path.join(root, "trace.tsv")
    open(trace_path, "w").close()
    log = _SchedulerLog(os.path.join(root, "scheduler.tsv"))
    jitter_rng = random.Random(run_params.get("seed", 0))

    started = time.perf_counter()
    sources = resolve_sources(spec, base_dir, run_params)

    channels: Dict[str, List[ChannelItem]] = {}
    tasks_by_process: Dict[str, List[_Task]] = {}
    terminal_by_process: Dict[str, int] = {}
    expanded = set()
    ready = deque()
    waiting: List[_Task] = []
    running = 0
    completions: "queue.Queue" = queue.Queue()
    warnings: List[str] = []
    pool = ThreadPoolExecutor(max_workers=options.max_parallel)

    def channel_ready(name, stack=()):
        channel = spec.channel(name)
        if channel is None or name in stack:
            return False
        src = channel.source
        if src.type == "output":
            p = src.process
            if p not in expanded or terminal_by_process[p] < len(tasks_by_process[p]):
                return False
        for op in channel.ops:
            if op.op == "cross" and not channel_ready(op.with_channel, stack + (name,)):
                return False
        return True

    def materialize_channel(name, stack=()):
        if name in channels:
            return channels[name]
        channel = spec.channel(name)
        src = channel.source
        if src.type == "output":
            items = []
            for tr in tasks_by_process[src.process]:
                if tr.state in (TaskState.SUCCEEDED, TaskState.CACHED):
                    items.append(ChannelItem(payload=tr.outcome.outputs.get(src.port),
                                             origins=frozenset({tr.inst.task_id})))
                else:
                    items.append(ChannelItem(payload=None,
                                             origins=frozenset({tr.inst.task_id}),
                                             poisoned=True))
        else:
            items = list(sources.get(name, []))
        for op in channel.ops:
            other = None
            if op.op == "cross":
                other = materialize_channel(op.with_channel, stack + (name,))
            items = apply_channel_op(items, op, other)
        channels[name] = items
        return items

    def record_trace(tr, status, cache_hit=False):
        out = tr.outcome or TaskOutcome(status=status)
        append_trace(TraceRecord(
            task_id=tr.inst.task_id, process=tr.inst.process, tag=tr.inst.tag,
            status=status, attempt=tr.attempt, submit_ms=tr.submit_ms,
            start_ms=tr.start_ms, complete_ms=tr.complete_ms,
            duration_ms=tr.complete_ms - tr.start_ms,
            cpu_fraction=out.cpu_fraction, peak_rss_bytes=out.peak_rss_bytes,
            cache_hit=cache_hit), trace_path)

    def check_emits(tr):
        declared = tr.proc.emits_map
        if not declared or tr.outcome is None:
            return
        for port, value in declared.items():
            expected = value if isinstance(value, int) else run_params.get(value)
            produced = (tr.outcome.outputs or {}).get(port)
            if isinstance(expected, int) and isinstance(produced, list) \
                    and len(produced) != expected:
                warnings.append(
                    f"task {tr.inst.task_id}: port {port!r} emitted "
                    f"{len(produced)} items, declared {expected}")

    def expand_process(proc):
        inputs = {port: materialize_channel(ch) for port, ch in proc.inputs}
        count = task_count_for(inputs)
        bindings = bind_task_payloads(inputs, count)
        contract = registry.contract(proc.builtin) if proc.builtin else None
        tasks = []
        for ordinal, bound in enumerate(bindings):
            payload = {port: item.payload for port, item in bound.items()}
            poisoned = any(item.poisoned for item in bound.values())
            upstream = frozenset().union(*(item.origins for item in bound.values())) \
                if bound else frozenset()
            probe = TaskInstance(task_id="", process=proc.name, ordinal=ordinal,
                                 payload=payload)
            key = contract_cache_key(probe, contract)
            inst = TaskInstance(
                task_id=f"{proc.name}-{ordinal}-{key[:8]}", process=proc.name,
                ordinal=ordinal, payload=payload,
                tag=render_tag(proc.tag, payload, run_params, proc.name, ordinal),
                upstream=upstream)
            tr = _Task(inst, proc, key)
            tasks.append(tr)

            if poisoned:
                tr.state = TaskState.SKIPPED
                tr.start_ms = tr.complete_ms = tr.submit_ms
                record_trace(tr, "Skipped")
                log.event("skip", inst.task_id, running)
                continue

            if options.resume:
                t0 = time.perf_counter()
                entry = store.lookup(key)
                if entry is not None:
                    lookup_ms = int((time.perf_counter() - t0) * 1000)
                    tr.state = TaskState.CACHED
                    tr.start_ms = tr.submit_ms
                    tr.complete_ms = tr.start_ms + lookup_ms
                    tr.outcome = TaskOutcome(status="Cached", outputs=entry.outputs,
                                             workdir=entry.workdir,
                                             duration_ms=float(lookup_ms))
                    record_trace(tr, "Cached", cache_hit=True)
                    log.event("cached", inst.task_id, running)
                    check_emits(tr)
                    continue

            tr.state = TaskState.READY
            ready.append(tr)

        tasks_by_process[proc.name] = tasks
        terminal_by_process[proc.name] = sum(
            1 for t in tasks if t.state in TERMINAL_STATES)
        expanded.add(proc.name)

    def try_expand():
        progress = False
        for proc in spec.processes:
            if proc.name in expanded:
                continue
            if all(channel_ready(ch) for _port, ch in proc.inputs):
                expand_process(proc)
                progress = True
        return progress

    def worker(tr):
        outcome = execute_task(tr.inst, tr.proc, registry, tr.workdir,
                               run_params, base_dir, options.timeout_s)
        if outcome.status == "Succeeded":
            contract = registry.contract(tr.proc.builtin) if tr.proc.builtin else None
            version = contract.version if contract else "exec"
            try:
                store.store(tr.key, version, outcome.outputs,
                            timing={"duration_ms": outcome.duration_ms},
                            process=tr.inst.process, task_id=tr.inst.task_id)
            except SerializationError as exc:
                outcome = TaskOutcome(status="Failed", error=str(exc),
                                      workdir=tr.workdir,
                                      duration_ms=outcome.duration_ms)
        completions.put((tr, outcome))

    def dispatch():
        nonlocal running
        while ready and running < options.max_parallel:
            tr = ready.popleft()
            tr.state = TaskState.RUNNING
            tr.start_ms = _now_ms()
            tr.workdir = store.prepare_workdir(tr.key)
            running += 1
            log.event("start", tr.inst.task_id, running)
            pool.submit(worker, tr)

    def handle_completion(tr, outcome):
        nonlocal running
        running -= 1
        tr.outcome = outcome
        tr.complete_ms = max(_now_ms(), tr.start_ms)
        log.event("end", tr.inst.task_id, running)
        if outcome.status == "Succeeded":
            tr.state = TaskState.SUCCEEDED
            terminal_by_process[tr.inst.process] += 1
            record_trace(tr, "Succeeded")
            check_emits(tr)
            return
        policy = RetryPolicy(max_retries=tr.proc.retries,
                             base_delay_ms=options.base_delay_ms)
        decision: RetryDecision = apply_retry_policy(outcome, policy, tr.attempt,
                                                     rng=jitter_rng)
        if decision.action == "retry":
            tr.attempt += 1
            tr.state = TaskState.RETRY_WAIT
            tr.wake_at = time.monotonic() + decision.delay_ms / 1000.0
            waiting.append(tr)
            log.event("retry-wait", tr.inst.task_id, running)
        else:
            tr.state = TaskState.FAILED_PERMANENT
            terminal_by_process[tr.inst.process] += 1
            record_trace(tr, "FailedPermanent")
            warnings.append(f"task {tr.inst.task_id} failed permanently: "
                            f"{outcome.error}")

    def wake_retries():
        now = time.monotonic()
        for tr in [t for t in waiting if t.wake_at <= now]:
            waiting.remove(tr)
            tr.state = TaskState.READY
            ready.append(tr)

    def all_done():
        if len(expanded) < len(spec.processes):
            return False
        return not ready and not waiting and running == 0 and all(
            terminal_by_process[p] == len(tasks_by_process[p]) for p in expanded)

    aborted = False
    try:
        try_expand()
        while not all_done():
            wake_retries()
            dispatch()
            if all_done():
                break
            timeout = None
            if waiting:
                timeout = max(0.005, min(t.wake_at for t in waiting) - time.monotonic())
            if running == 0 and not ready and timeout is None:
                if not try_expand():
                    raise RuntimeError(
                        "scheduler stalled: no runnable work but processes remain")
                continue
            try:
                tr, outcome = completions.get(timeout=timeout)
            except queue.Empty:
                continue
            handle_completion(tr, outcome)
            while True:
                try:
                    tr, outcome = completions.get_nowait()
                except queue.Empty:
                    break
                handle_completion(tr, outcome)
            try_expand()
    except KeyboardInterrupt:
        aborted = True
    finally:
        pool.shutdown(wait=not aborted, cancel_futures=aborted)
        log.close()

    if aborted:
        raise RunAbortedError("run interrupted; state remains valid for --resume")

    state_counts: Dict[str, int] = {}
    outputs: Dict[str, list] = {}
    for name, tasks in tasks_by_process.items():
        outputs[name] = [t.outcome.outputs if t.outcome is not None else None
                         for t in tasks]
        for t in tasks:
            state_counts[t.state.value] = state_counts.get(t.state.value, 0) + 1

    executed = state_counts.get("Succeeded", 0)
    cached = state_counts.get("Cached", 0)
    failed = state_counts.get("FailedPermanent", 0)
    skipped = state_counts.get("Skipped", 0)
    result = RunResult(
        workflow=spec.name, workdir=root, state_counts=state_counts,
        process_counts={p: len(t) for p, t in tasks_by_process.items()},
        executed=executed, cached=cached, failed=failed, skipped=skipped,
        peak_parallel=log.peak, elapsed_ms=(time.perf_counter() - started) * 1000.0,
        trace_path=trace_path, scheduler_log_path=log.path,
        success=failed == 0 and skipped == 0, warnings=warnings, outputs=outputs)

    with open(os.path.join(root, "run.json"), "w", encoding="utf-8") as fh:
        json.dump(result.to_dict(), fh, indent=2)
    return result
