from .trace import ABSENT, TRACE_HEADER, TraceRecord, append_trace, read_trace
from .stats import (
    METRICS, MetricStats, ProcessStats, aggregate_records, aggregate_stats,
    stats_to_csv, summarize_samples,
)
from .report import render_provenance_report

__all__ = [
    "ABSENT", "TRACE_HEADER", "TraceRecord", "append_trace", "read_trace",
    "METRICS", "MetricStats", "ProcessStats", "aggregate_records",
    "aggregate_stats", "stats_to_csv", "summarize_samples",
    "render_provenance_report",
]
