"""Single-task execution: builtin dispatch and local command tasks."""

import os
import subprocess
import time
from dataclasses import dataclass, field

from ..errors import TaskFailedError
from ..payload import canonical_json
from ..registry import ComponentContract, OperationRegistry
from ..workflow.channels import interpolate
from ..workflow.model import ProcessDef
from .resources import ProcessMonitor
from .task import TaskInstance, TaskOutcome


@dataclass
class TaskContext:
    """What a builtin operation sees besides its input payloads."""

    workdir: str
    params: dict = field(default_factory=dict)
    base_dir: str = "."

    def resolve(self, path) -> str:
        path = str(path)
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)


def _is_fileref(payload) -> bool:
    return isinstance(payload, dict) and set(payload) == {"path"}


def _run_builtin(task, contract: ComponentContract, impl, ctx: TaskContext) -> TaskOutcome:
    wall0 = time.perf_counter()
    cpu0 = time.thread_time()
    try:
        outputs = impl(ctx, **task.payload)
    except Exception as exc:  # builtin errors become failed outcomes
        return TaskOutcome(status="Failed", error=f"{type(exc).__name__}: {exc}",
                           workdir=ctx.workdir,
                           duration_ms=(time.perf_counter() - wall0) * 1000.0,
                           cpu_fraction=None, peak_rss_bytes=None)
    wall = max(1e-9, time.perf_counter() - wall0)
    cpu_fraction = (time.thread_time() - cpu0) / wall

    if not isinstance(outputs, dict) or set(outputs) != set(contract.outputs):
        return TaskOutcome(
            status="Failed",
            error=f"builtin produced ports {sorted(outputs) if isinstance(outputs, dict) else type(outputs).__name__}, "
                  f"contract declares {sorted(contract.outputs)}",
            workdir=ctx.workdir, duration_ms=wall * 1000.0)
    return TaskOutcome(status="Succeeded", outputs=outputs, workdir=ctx.workdir,
                       duration_ms=wall * 1000.0, cpu_fraction=cpu_fraction,
                       peak_rss_bytes=None)


def _run_command(task, proc_def: ProcessDef, ctx: TaskContext,
                 timeout_s) -> TaskOutcome:
    # stage inputs: FileRef payloads pass through, others land as JSON files
    context = dict(ctx.params)
    for port, payload in task.payload.items():
        if _is_fileref(payload):
            context[port] = ctx.resolve(payload["path"])
        else:
            staged = os.path.join(ctx.workdir, f"in_{port}.json")
            with open(staged, "w", encoding="utf-8") as fh:
                fh.write(canonical_json(payload))
            context[port] = staged
    command = interpolate(proc_def.command, context)

    wall0 = time.perf_counter()
    out_path = os.path.join(ctx.workdir, ".command.out")
    err_path = os.path.join(ctx.workdir, ".command.err")
    with open(out_path, "wb") as out, open(err_path, "wb") as err:
        proc = subprocess.Popen(command, shell=True, cwd=ctx.workdir,
                                stdout=out, stderr=err)
        monitor = ProcessMonitor(proc.pid)
        deadline = None if timeout_s is None else time.monotonic() + timeout_s
        while True:
            monitor.poll()
            exit_code = proc.poll()
            if exit_code is not None:
                break
            if deadline is not None and time.monotonic() > deadline:
                proc.kill()
                proc.wait()
                monitor.finish()
                return TaskOutcome(status="Failed",
                                   error=f"timeout after {timeout_s}s",
                                   workdir=ctx.workdir,
                                   duration_ms=(time.perf_counter() - wall0) * 1000.0)
            monitor.poll()
            time.sleep(0.02)
    cpu_fraction, peak_rss = monitor.finish()
    duration_ms = (time.perf_counter() - wall0) * 1000.0

    if exit_code != 0:
        return TaskOutcome(status="Failed", error=f"exit code {exit_code}",
                           workdir=ctx.workdir, duration_ms=duration_ms,
                           cpu_fraction=cpu_fraction, peak_rss_bytes=peak_rss)

    outputs = {}
    for port, _type in proc_def.outputs:
        path = os.path.join(ctx.workdir, port)
        if not os.path.exists(path):
            return TaskOutcome(status="Failed",
                               error=f"command did not produce output file {port!r}",
                               workdir=ctx.workdir, duration_ms=duration_ms,
                               cpu_fraction=cpu_fraction, peak_rss_bytes=peak_rss)
        outputs[port] = {"path": path}
    return TaskOutcome(status="Succeeded", outputs=outputs, workdir=ctx.workdir,
                       duration_ms=duration_ms, cpu_fraction=cpu_fraction,
                       peak_rss_bytes=peak_rss)


def execute_task(task: TaskInstance, proc_def: ProcessDef,
                 registry: OperationRegistry, workdir: str, params: dict,
                 base_dir: str = ".", timeout_s=None) -> TaskOutcome:
    """Run one attempt of a task in `workdir`; never raises for task errors."""
    os.makedirs(workdir, exist_ok=True)
    ctx = TaskContext(workdir=workdir, params=dict(params), base_dir=str(base_dir))
    if proc_def.builtin is not None:
        contract = registry.contract(proc_def.builtin)
        impl = registry.implementation(proc_def.builtin)
        if contract is None or impl is None:
            raise TaskFailedError(f"operation {proc_def.builtin!r} is not registered")
        return _run_builtin(task, contract, impl, ctx)
    return _run_command(task, proc_def, ctx, timeout_s)
