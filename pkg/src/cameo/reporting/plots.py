"""Per-site design plots: grouped bars of optimal energy size.

One panel per chemistry; duration groups on the x axis; one bar series
per power rating; error bars show +-1 sample standard deviation across
the group's stochastic instances (omitted when n == 1).  The SVG embeds a
machine-readable data island so tests and downstream tools read values
back instead of measuring pixels.
"""

import json
import re

from ..errors import UnknownSiteError
from ..payload import canonical_json
from .summary import SummaryTable
from .svg import document, line, nice_ticks, rect, text

_COLORS = ["#4878a8", "#e49444"]
_PANEL_W, _PANEL_H = 380, 300
_MARGIN_L, _MARGIN_B, _MARGIN_T = 64, 56, 40

_DATA_ISLAND = re.compile(r"<!--design-data:(.*?)-->", re.S)


def extract_data_island(svg_text: str) -> dict:
    """Read back the structured values a design plot was drawn from."""
    m = _DATA_ISLAND.search(svg_text)
    if m is None:
        raise ValueError("no design data island in SVG")
    return json.loads(m.group(1))


def render_design_plot(table: SummaryTable, site_id: str) -> str:
    """Render the grouped bar chart for one site; returns SVG text."""
    groups = [g for g in table.groups if g.site_id == site_id]
    if not groups:
        raise UnknownSiteError(f"no results for site {site_id!r}")

    chemistries = sorted({g.chemistry for g in groups})
    durations = sorted({g.duration_h for g in groups})
    ratings = sorted({g.rating_mw for g in groups})
    by_key = {(g.chemistry, g.duration_h, g.rating_mw): g for g in groups}

    peak = max((g.e_star_mean_mwh + g.e_star_std_mwh for g in groups), default=1.0)
    peak = peak if peak > 0 else 1.0
    ticks = nice_ticks(0.0, peak * 1.08)
    y_top = max(ticks[-1], peak * 1.08)

    width = _MARGIN_L + _PANEL_W * len(chemistries) + 24
    height = _MARGIN_T + _PANEL_H + _MARGIN_B
    plot_h = _PANEL_H

    def sy(v):
        return _MARGIN_T + plot_h - (v / y_top) * plot_h

    body = [text(width / 2, 20,
                 f"Optimal battery energy size, site {site_id}", size=15)]
    for tick in ticks:
        body.append(line(_MARGIN_L - 4, sy(tick), width - 24, sy(tick),
                         stroke="#ddd", width=0.75))
        body.append(text(_MARGIN_L - 8, sy(tick) + 4, f"{tick:g}", size=10,
                         anchor="end"))
    body.append(text(16, _MARGIN_T + plot_h / 2, "E* (MWh)", size=12,
                     rotate=-90))

    n_series = len(ratings)
    group_w = _PANEL_W / max(1, len(durations)) * 0.82
    bar_w = group_w / max(1, n_series) * 0.8

    for ci, chem in enumerate(chemistries):
        x0 = _MARGIN_L + ci * _PANEL_W
        body.append(text(x0 + _PANEL_W / 2, _MARGIN_T - 6, f"chemistry: {chem}",
                         size=12))
        body.append(line(x0, _MARGIN_T + plot_h, x0 + _PANEL_W - 16,
                         _MARGIN_T + plot_h))
        for di, duration in enumerate(durations):
            gx = x0 + (di + 0.5) * (_PANEL_W - 16) / len(durations)
            body.append(text(gx, _MARGIN_T + plot_h + 16, f"{duration:g} h", size=11))
            for ri, rating in enumerate(ratings):
                g = by_key.get((chem, duration, rating))
                if g is None:
                    continue
                bx = gx - group_w / 2 + (ri + 0.1) * bar_w / 0.8
                top = sy(g.e_star_mean_mwh)
                body.append(rect(bx, top, bar_w, _MARGIN_T + plot_h - top,
                                 fill=_COLORS[ri % len(_COLORS)], stroke="#333"))
                if g.n > 1 and g.e_star_std_mwh > 0:
                    cx = bx + bar_w / 2
                    lo = sy(max(0.0, g.e_star_mean_mwh - g.e_star_std_mwh))
                    hi = sy(g.e_star_mean_mwh + g.e_star_std_mwh)
                    body.append(line(cx, hi, cx, lo, stroke="#111", width=1.2))
                    body.append(line(cx - 4, hi, cx + 4, hi, stroke="#111", width=1.2))
                    body.append(line(cx - 4, lo, cx + 4, lo, stroke="#111", width=1.2))

    lx = _MARGIN_L
    ly = _MARGIN_T + plot_h + 34
    for ri, rating in enumerate(ratings):
        body.append(rect(lx, ly - 9, 12, 10, fill=_COLORS[ri % len(_COLORS)],
                         stroke="#333"))
        body.append(text(lx + 18, ly, f"{rating:g} MW rating", size=11,
                         anchor="start"))
        lx += 130
    body.append(text(lx + 10, ly, "error bars: +-1 sample std (n > 1)", size=10,
                     anchor="start", fill="#555"))

    island = canonical_json({
        "site_id": site_id,
        "groups": [{"chemistry": g.chemistry, "duration_h": g.duration_h,
                    "rating_mw": g.rating_mw, "n": g.n,
                    "e_star_mean_mwh": g.e_star_mean_mwh,
                    "e_star_std_mwh": g.e_star_std_mwh} for g in groups],
    })
    return document(width, height, body, comment=f"design-data:{island}")
