"""Consolidation of design results into the run's summary CSV.

The CSV holds one row per result in a deterministic order (grouping keys,
then stochastic id) followed by a ``# aggregates`` trailer with per-group
mean/std of the optimal energy size.  Wall-clock solve time is volatile
across runs and is therefore written as ``-`` in this artifact (it stays
in each task's stored result payload and in the trace); everything else
is bit-reproducible for equal seeds.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from ..errors import EmptyInputError
from ..optimizer.sizing import RESULT_CSV_HEADER, DesignResult

AGGREGATE_MARKER = "# aggregates"
AGGREGATE_HEADER = "# site_id,chemistry,duration_h,rating_mw,n,e_star_mean_mwh,e_star_std_mwh"


@dataclass(frozen=True)
class GroupAggregate:
    site_id: str
    chemistry: str
    duration_h: float
    rating_mw: float
    n: int
    e_star_mean_mwh: float
    e_star_std_mwh: float


@dataclass
class SummaryTable:
    rows: List[DesignResult]
    groups: List[GroupAggregate]

    @property
    def site_ids(self):
        return sorted({r.site_id for r in self.rows})


def _group_key(r: DesignResult):
    return (r.site_id, r.chemistry, r.duration_h, r.rating_mw)


def consolidate_results(results: List[DesignResult]) -> SummaryTable:
    """Sort results and aggregate E* per (site, chemistry, duration, rating)."""
    if not results:
        raise EmptyInputError("no design results to consolidate")
    rows = sorted(results, key=lambda r: _group_key(r) + (r.stochastic_id,))

    groups = []
    current, bucket = None, []
    for r in rows + [None]:
        key = _group_key(r) if r is not None else None
        if key != current:
            if bucket:
                e = np.array([b.e_star_mwh for b in bucket])
                groups.append(GroupAggregate(
                    site_id=bucket[0].site_id, chemistry=bucket[0].chemistry,
                    duration_h=bucket[0].duration_h, rating_mw=bucket[0].rating_mw,
                    n=len(bucket), e_star_mean_mwh=float(e.mean()),
                    e_star_std_mwh=float(np.std(e, ddof=1)) if len(e) > 1 else 0.0))
            current, bucket = key, []
        if r is not None:
            bucket.append(r)
    return SummaryTable(rows=rows, groups=groups)


def _row_fields(r: DesignResult) -> list:
    return [
        r.site_id, r.battery_id, r.chemistry, repr(float(r.duration_h)),
        repr(float(r.rating_mw)), r.stochastic_id, repr(float(r.p_star_mw)),
        repr(float(r.e_star_mwh)), repr(float(r.daily_rev_usd)),
        repr(float(r.gross_usd)), repr(float(r.cost_usd)), repr(float(r.net_usd)),
        r.status, "-", str(int(r.iterations)),
    ]


def summary_to_csv(table: SummaryTable) -> str:
    lines = [",".join(RESULT_CSV_HEADER)]
    lines.extend(",".join(_row_fields(r)) for r in table.rows)
    lines.append(AGGREGATE_MARKER)
    lines.append(AGGREGATE_HEADER)
    for g in table.groups:
        lines.append("# " + ",".join([
            g.site_id, g.chemistry, repr(float(g.duration_h)), repr(float(g.rating_mw)),
            str(g.n), repr(g.e_star_mean_mwh), repr(g.e_star_std_mwh)]))
    return "\n".join(lines) + "\n"


def read_consolidated_csv(text: str):
    """Parse a consolidated CSV back into (row dicts, aggregate dicts)."""
    lines = text.splitlines()
    rows, groups, in_trailer = [], [], False
    for line in lines[1:]:
        if line == AGGREGATE_MARKER:
            in_trailer = True
            continue
        if in_trailer:
            if line == AGGREGATE_HEADER or not line.startswith("# "):
                continue
            f = line[2:].split(",")
            groups.append({"site_id": f[0], "chemistry": f[1],
                           "duration_h": float(f[2]), "rating_mw": float(f[3]),
                           "n": int(f[4]), "e_star_mean_mwh": float(f[5]),
                           "e_star_std_mwh": float(f[6])})
        elif line.strip():
            f = line.split(",")
            rows.append(dict(zip(RESULT_CSV_HEADER, f)))
    return rows, groups
