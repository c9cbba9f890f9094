"""Provenance report bundle: stats CSV plus a self-contained HTML page.

The HTML embeds one inline-SVG box plot per process and metric (duration,
CPU, memory) next to a table whose cells are the exact strings written to
the CSV, so the two artifacts can never disagree.
"""

import html
import os
from typing import List

from ..reporting.svg import line, rect, text
from .stats import METRICS, ProcessStats, stats_to_csv
from .trace import read_trace

_METRIC_LABELS = {"duration": "duration (ms)", "cpu": "CPU fraction",
                  "memory": "peak RSS (bytes)"}

_BOX_W, _BOX_H = 260, 90


def _box_plot_svg(ms) -> str:
    """Horizontal box plot (min, Q1, median, Q3, max) as an SVG fragment."""
    lo, hi = ms.min, ms.max
    span = hi - lo
    if span <= 0:
        lo, hi, span = lo - 1.0, hi + 1.0, 2.0
    pad = 14

    def sx(v):
        return pad + (v - lo) / span * (_BOX_W - 2 * pad)

    mid, half = _BOX_H / 2 - 8, 16
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_BOX_W}" height="{_BOX_H}" '
        f'viewBox="0 0 {_BOX_W} {_BOX_H}">',
        line(sx(ms.min), mid, sx(ms.q1), mid),
        line(sx(ms.q3), mid, sx(ms.max), mid),
        line(sx(ms.min), mid - half / 2, sx(ms.min), mid + half / 2),
        line(sx(ms.max), mid - half / 2, sx(ms.max), mid + half / 2),
        rect(sx(ms.q1), mid - half, max(1.0, sx(ms.q3) - sx(ms.q1)), 2 * half,
             fill="#7aa6d6", stroke="#333"),
        line(sx(ms.median), mid - half, sx(ms.median), mid + half, stroke="#b03030",
             width=2.0),
        text(sx(ms.min), _BOX_H - 4, repr(ms.min), size=9, anchor="start"),
        text(sx(ms.max), _BOX_H - 4, repr(ms.max), size=9, anchor="end"),
        "</svg>",
    ]
    return "".join(parts)


def render_provenance_report(stats: List[ProcessStats], trace_path, out_dir) -> dict:
    """Write stats.csv and report.html under out_dir; returns their paths."""
    if not stats:
        raise ValueError("no process statistics to report")
    os.makedirs(out_dir, exist_ok=True)
    csv_text = stats_to_csv(stats)
    csv_path = os.path.join(str(out_dir), "stats.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(csv_text)

    records = read_trace(trace_path)
    totals = {"tasks": len(records),
              "cached": sum(1 for r in records if r.cache_hit)}

    doc = [
        "<!DOCTYPE html>",
        "<html><head><meta charset='utf-8'><title>Run provenance</title>",
        "<style>body{font-family:sans-serif;margin:24px;}table{border-collapse:collapse;}"
        "td,th{border:1px solid #bbb;padding:3px 8px;font-size:13px;}"
        "h2{margin-top:28px;}div.panel{display:inline-block;margin:6px 14px 6px 0;"
        "vertical-align:top;}div.absent{width:260px;height:90px;border:1px dashed #999;"
        "color:#777;display:flex;align-items:center;justify-content:center;"
        "font-size:12px;}</style></head><body>",
        "<h1>Run provenance report</h1>",
        f"<p>{totals['tasks']} task records, {totals['cached']} served from cache. "
        f"Trace: {html.escape(os.path.basename(str(trace_path)))}</p>",
    ]

    for ps in stats:
        doc.append(f"<h2>{html.escape(ps.process)}</h2>")
        doc.append(f"<p>{ps.count} executed, {ps.cached_count} cached.</p>")
        for metric in METRICS:
            ms = ps.metrics.get(metric)
            doc.append("<div class='panel'>")
            doc.append(f"<div><b>{html.escape(_METRIC_LABELS[metric])}</b></div>")
            if ms is None:
                doc.append("<div class='absent'>metric unavailable</div>")
            else:
                doc.append(_box_plot_svg(ms))
            doc.append("</div>")
        doc.append("<table><tr><th>metric</th><th>min</th><th>q1</th><th>median</th>"
                    "<th>q3</th><th>max</th><th>mean</th><th>std</th></tr>")
        for metric in METRICS:
            ms = ps.metrics.get(metric)
            fields = ms.as_csv_fields() if ms is not None else ["-"] * 7
            cells = "".join(f"<td>{html.escape(f)}</td>" for f in fields)
            doc.append(f"<tr><th>{metric}</th>{cells}</tr>")
        doc.append("</table>")

    doc.append("</body></html>")
    html_path = os.path.join(str(out_dir), "report.html")
    with open(html_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(doc) + "\n")
    return {"csv": csv_path, "html": html_path}
