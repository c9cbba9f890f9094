"""Per-process statistics over trace records.

Cached tasks are excluded from metric aggregation (they time the cache
lookup, not the work) but counted separately.  Quartiles use linear
interpolation between order statistics; the sample standard deviation of
a single observation is reported as 0.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from ..errors import DataParseError
from .trace import TraceRecord, read_trace

METRICS = ("duration", "cpu", "memory")

STATS_CSV_HEADER = "process,count,metric,min,q1,median,q3,max,mean,std"


@dataclass(frozen=True)
class MetricStats:
    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float
    std: float

    def as_csv_fields(self) -> list:
        return [repr(self.min), repr(self.q1), repr(self.median), repr(self.q3),
                repr(self.max), repr(self.mean), repr(self.std)]


@dataclass(frozen=True)
class ProcessStats:
    process: str
    count: int                      # non-cached task lines
    cached_count: int
    metrics: Dict[str, Optional[MetricStats]]


def summarize_samples(values: List[float]) -> MetricStats:
    arr = np.asarray(values, dtype=float)
    q1, median, q3 = np.percentile(arr, [25.0, 50.0, 75.0], method="linear")
    std = float(np.std(arr, ddof=1)) if len(arr) > 1 else 0.0
    return MetricStats(min=float(arr.min()), q1=float(q1), median=float(median),
                       q3=float(q3), max=float(arr.max()),
                       mean=float(arr.mean()), std=std)


def aggregate_records(records: List[TraceRecord]) -> List[ProcessStats]:
    if not records:
        raise DataParseError("no trace records to aggregate")
    order, grouped = [], {}
    for rec in records:
        if rec.process not in grouped:
            order.append(rec.process)
            grouped[rec.process] = []
        grouped[rec.process].append(rec)

    out = []
    for process in order:
        recs = grouped[process]
        live = [r for r in recs if not r.cache_hit]
        cached = len(recs) - len(live)
        samples = {
            "duration": [float(r.duration_ms) for r in live],
            "cpu": [r.cpu_fraction for r in live if r.cpu_fraction is not None],
            "memory": [float(r.peak_rss_bytes) for r in live
                       if r.peak_rss_bytes is not None],
        }
        metrics = {name: summarize_samples(vals) if vals else None
                   for name, vals in samples.items()}
        out.append(ProcessStats(process=process, count=len(live),
                                cached_count=cached, metrics=metrics))
    return out


def aggregate_stats(trace_path) -> List[ProcessStats]:
    """Aggregate a trace file; raises DataParseError with the line number."""
    return aggregate_records(read_trace(trace_path))


def stats_to_csv(stats: List[ProcessStats]) -> str:
    lines = [STATS_CSV_HEADER]
    for ps in stats:
        for metric in METRICS:
            ms = ps.metrics.get(metric)
            fields = ms.as_csv_fields() if ms is not None else ["-"] * 7
            lines.append(",".join([ps.process, str(ps.count), metric] + fields))
    return "\n".join(lines) + "\n"
