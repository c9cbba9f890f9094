"""Minimal deterministic SVG generation, shared by the report renderers.

Everything is emitted as plain strings so output files are byte-stable
across runs (no library-generated ids or timestamps).
"""

import math
from xml.sax.saxutils import escape


def fmt(x) -> str:
    """Coordinate formatting: short, stable."""
    return f"{float(x):.2f}".rstrip("0").rstrip(".")


def rect(x, y, w, h, fill, stroke="none", opacity=None) -> str:
    op = f' fill-opacity="{opacity}"' if opacity is not None else ""
    return (f'<rect x="{fmt(x)}" y="{fmt(y)}" width="{fmt(w)}" height="{fmt(h)}" '
            f'fill="{fill}" stroke="{stroke}"{op}/>')


def line(x1, y1, x2, y2, stroke="#333", width=1.0) -> str:
    return (f'<line x1="{fmt(x1)}" y1="{fmt(y1)}" x2="{fmt(x2)}" y2="{fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="{fmt(width)}"/>')


def text(x, y, content, size=11, anchor="middle", fill="#222", rotate=None) -> str:
    transform = ""
    if rotate is not None:
        transform = f' transform="rotate({fmt(rotate)} {fmt(x)} {fmt(y)})"'
    return (f'<text x="{fmt(x)}" y="{fmt(y)}" font-size="{fmt(size)}" '
            f'font-family="sans-serif" text-anchor="{anchor}" '
            f'fill="{fill}"{transform}>{escape(str(content))}</text>')


def document(width, height, body, comment=None) -> str:
    parts = ['<?xml version="1.0" encoding="UTF-8"?>']
    if comment is not None:
        parts.append(f"<!--{comment}-->")
    parts.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{fmt(width)}" '
                 f'height="{fmt(height)}" viewBox="0 0 {fmt(width)} {fmt(height)}">')
    parts.append(rect(0, 0, width, height, fill="#ffffff"))
    parts.extend(body)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def nice_ticks(lo, hi, n=5):
    """Round tick positions covering [lo, hi]."""
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / max(1, n)))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= n:
            step *= mult
            break
    start = math.floor(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * span:
        if t >= lo - 1e-9 * span:
            ticks.append(round(t, 10))
        t += step
    return ticks
