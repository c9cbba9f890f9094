"""Per-task resource sampling.

Command tasks run as child processes, so psutil can attribute CPU time
and resident memory to them directly; the executor polls the child and
records a sample each 250 ms cadence tick, keeping the last successful
reading because the final one races with process exit.  For in-process
builtin tasks the worker measures its own thread CPU time; per-task
resident memory is not attributable inside a shared process and is
recorded as absent (never zero).
"""

import threading
import time
from dataclasses import dataclass
from typing import List, Optional

try:
    import psutil
except ImportError:  # degraded platform: metrics become absent
    psutil = None

SAMPLE_INTERVAL_MS = 250.0


@dataclass(frozen=True)
class ResourceSample:
    t_ms: float
    cpu_fraction: Optional[float]
    rss_bytes: Optional[int]


def sample_resources(pid: int, stop: threading.Event,
                     interval_ms: float = SAMPLE_INTERVAL_MS) -> List[ResourceSample]:
    """Sample a child process until it exits or `stop` is set."""
    samples: List[ResourceSample] = []
    if psutil is None:
        stop.wait()
        return samples
    try:
        proc = psutil.Process(pid)
        t0 = time.monotonic()
        last_cpu = sum(proc.cpu_times()[:2])
    except psutil.Error:
        return samples
    last_t = t0
    while not stop.wait(interval_ms / 1000.0):
        try:
            now = time.monotonic()
            cpu = sum(proc.cpu_times()[:2])
            rss = proc.memory_info().rss
        except psutil.Error:
            break
        wall = max(1e-9, now - last_t)
        samples.append(ResourceSample(t_ms=(now - t0) * 1000.0,
                                      cpu_fraction=(cpu - last_cpu) / wall,
                                      rss_bytes=rss))
        last_cpu, last_t = cpu, now
    return samples


class ProcessMonitor:
    """Poll-driven monitor for one child process.

    Call poll() frequently while waiting on the child; it samples only
    when a cadence tick is due.  finish() returns (mean cpu fraction,
    peak rss), either of which is None when nothing could be measured.
    """

    def __init__(self, pid: int, interval_ms: float = SAMPLE_INTERVAL_MS):
        self.pid = pid
        self.samples: List[ResourceSample] = []
        self._interval_s = interval_ms / 1000.0
        self._wall0 = time.monotonic()
        self._next_due = self._wall0
        self._peak_rss: Optional[int] = None
        self._cpu0: Optional[float] = None
        self._last_cpu: Optional[float] = None
        self._last_wall = self._wall0
        if psutil is None:
            self._proc = None
        else:
            try:
                self._proc = psutil.Process(pid)
                self._cpu0 = sum(self._proc.cpu_times()[:2])
                self._last_cpu = self._cpu0
            except psutil.Error:
                self._proc = None

    def poll(self, force: bool = False) -> None:
        if self._proc is None:
            return
        now = time.monotonic()
        if not force and now < self._next_due:
            return
        try:
            cpu = sum(self._proc.cpu_times()[:2])
            rss = self._proc.memory_info().rss
        except psutil.Error:
            self._proc = None
            return
        self.samples.append(ResourceSample(
            t_ms=(now - self._wall0) * 1000.0,
            cpu_fraction=(cpu - self._last_cpu) / max(1e-9, now - self._last_wall),
            rss_bytes=rss))
        self._last_cpu, self._last_wall = cpu, now
        self._peak_rss = rss if self._peak_rss is None else max(self._peak_rss, rss)
        self._next_due = now + self._interval_s

    def finish(self):
        self.poll(force=True)  # best effort; a no-op once the child is gone
        wall = max(1e-9, time.monotonic() - self._wall0)
        cpu = None
        if self._cpu0 is not None and self._last_cpu is not None and self.samples:
            cpu = (self._last_cpu - self._cpu0) / wall
        return cpu, self._peak_rss
