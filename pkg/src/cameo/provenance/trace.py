"""Append-only task trace (trace.tsv).

One tab-separated line per task reaching a terminal state; absent metrics
are written as ``-`` so the file never conflates "unmeasured" with zero.
The file is valid after any prefix of appends.
"""

import os
from dataclasses import dataclass
from typing import List, Optional

from ..errors import DataParseError, InvariantError

TRACE_HEADER = ["task_id", "process", "tag", "status", "attempt", "submit_ms",
                "start_ms", "complete_ms", "duration_ms", "cpu_fraction",
                "peak_rss_bytes", "cache_hit"]
ABSENT = "-"


@dataclass(frozen=True)
class TraceRecord:
    task_id: str
    process: str
    tag: str
    status: str
    attempt: int
    submit_ms: int
    start_ms: int
    complete_ms: int
    duration_ms: int
    cpu_fraction: Optional[float]
    peak_rss_bytes: Optional[int]
    cache_hit: bool

    def __post_init__(self):
        if not (self.complete_ms >= self.start_ms >= self.submit_ms):
            raise InvariantError(
                f"task {self.task_id}: timestamps must satisfy complete >= start >= submit")
        if self.duration_ms != self.complete_ms - self.start_ms:
            raise InvariantError(
                f"task {self.task_id}: duration must equal complete - start")

    def to_line(self) -> str:
        fields = [
            self.task_id, self.process, self.tag, self.status, str(self.attempt),
            str(self.submit_ms), str(self.start_ms), str(self.complete_ms),
            str(self.duration_ms),
            ABSENT if self.cpu_fraction is None else repr(float(self.cpu_fraction)),
            ABSENT if self.peak_rss_bytes is None else str(int(self.peak_rss_bytes)),
            "true" if self.cache_hit else "false",
        ]
        return "\t".join(fields)


def append_trace(record: TraceRecord, path) -> None:
    """Append one record; the header is written when the file is new."""
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", encoding="utf-8") as fh:
        if new:
            fh.write("\t".join(TRACE_HEADER) + "\n")
        fh.write(record.to_line() + "\n")
        fh.flush()


def read_trace(path) -> List[TraceRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DataParseError(f"{path}: empty trace file")
    if lines[0].split("\t") != TRACE_HEADER:
        raise DataParseError(f"{path}: bad trace header", row=1)
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(TRACE_HEADER):
            raise DataParseError(f"{path}: expected {len(TRACE_HEADER)} fields, "
                                 f"got {len(fields)}", row=line_no)
        try:
            records.append(TraceRecord(
                task_id=fields[0], process=fields[1], tag=fields[2], status=fields[3],
                attempt=int(fields[4]), submit_ms=int(fields[5]),
                start_ms=int(fields[6]), complete_ms=int(fields[7]),
                duration_ms=int(fields[8]),
                cpu_fraction=None if fields[9] == ABSENT else float(fields[9]),
                peak_rss_bytes=None if fields[10] == ABSENT else int(fields[10]),
                cache_hit=fields[11] == "true"))
        except (ValueError, InvariantError) as exc:
            raise DataParseError(f"{path}: {exc}", row=line_no) from None
    return records
