from .summary import (
    AGGREGATE_HEADER, AGGREGATE_MARKER, GroupAggregate, SummaryTable,
    consolidate_results, read_consolidated_csv, summary_to_csv,
)
from .plots import extract_data_island, render_design_plot

__all__ = [
    "AGGREGATE_HEADER", "AGGREGATE_MARKER", "GroupAggregate", "SummaryTable",
    "consolidate_results", "read_consolidated_csv", "summary_to_csv",
    "extract_data_island", "render_design_plot",
]
