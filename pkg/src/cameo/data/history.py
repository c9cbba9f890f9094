"""Hourly wind/price histories and their slicing into representative days.

history.csv columns: site_id,timestamp_utc,wind_ms,da_usd_mwh,rt_usd_mwh,
res_usd_mw.  Timestamps must be contiguous hourly UTC and cover whole
days.  Sources without a reserve-price series may declare a constant
fallback in the header instead (last column ``res_usd_mw=<value>``, rows
then carry five fields).
"""

import csv
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import List

from ..errors import DataParseError, GapError, InvariantError, RangeError
from .powercurve import DEFAULT_CURVE, PowerCurve, wind_to_power

CSV_HEADER = ["site_id", "timestamp_utc", "wind_ms", "da_usd_mwh", "rt_usd_mwh", "res_usd_mw"]
_TS_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


def parse_ts(text: str) -> datetime:
    return datetime.strptime(text, _TS_FORMAT).replace(tzinfo=timezone.utc)


def format_ts(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime(_TS_FORMAT)


@dataclass(frozen=True)
class HistoricalRecord:
    site_id: str
    start_utc: str                 # first hour, ISO "YYYY-mm-ddTHH:MM:SSZ"
    wind_ms: tuple
    da_usd_mwh: tuple
    rt_usd_mwh: tuple
    res_usd_mw: tuple

    def __post_init__(self):
        n = len(self.wind_ms)
        if not (len(self.da_usd_mwh) == len(self.rt_usd_mwh) == len(self.res_usd_mw) == n):
            raise InvariantError("history series lengths differ")
        if n == 0 or n % 24 != 0:
            raise InvariantError(f"history length {n} is not a positive multiple of 24")
        if any(w < 0 for w in self.wind_ms):
            raise RangeError("wind speed must be non-negative")
        parse_ts(self.start_utc)

    @property
    def n_hours(self) -> int:
        return len(self.wind_ms)

    @property
    def n_days(self) -> int:
        return self.n_hours // 24

    def to_dict(self) -> dict:
        return {"site_id": self.site_id, "start_utc": self.start_utc,
                "wind_ms": list(self.wind_ms), "da_usd_mwh": list(self.da_usd_mwh),
                "rt_usd_mwh": list(self.rt_usd_mwh), "res_usd_mw": list(self.res_usd_mw)}

    @staticmethod
    def from_dict(d) -> "HistoricalRecord":
        return HistoricalRecord(
            site_id=d["site_id"], start_utc=d["start_utc"],
            wind_ms=tuple(d["wind_ms"]), da_usd_mwh=tuple(d["da_usd_mwh"]),
            rt_usd_mwh=tuple(d["rt_usd_mwh"]), res_usd_mw=tuple(d["res_usd_mw"]))


@dataclass(frozen=True)
class DayProfile:
    date: str                       # "YYYY-mm-dd"
    wind_factor: tuple              # 24 values in [0, 1]
    da_usd_mwh: tuple
    rt_usd_mwh: tuple
    res_usd_mw: tuple

    def __post_init__(self):
        for series in (self.wind_factor, self.da_usd_mwh, self.rt_usd_mwh, self.res_usd_mw):
            if len(series) != 24:
                raise InvariantError("day profile series must have 24 entries")

    def to_dict(self) -> dict:
        return {"date": self.date, "wind_factor": list(self.wind_factor),
                "da_usd_mwh": list(self.da_usd_mwh), "rt_usd_mwh": list(self.rt_usd_mwh),
                "res_usd_mw": list(self.res_usd_mw)}

    @staticmethod
    def from_dict(d) -> "DayProfile":
        return DayProfile(date=d["date"], wind_factor=tuple(d["wind_factor"]),
                          da_usd_mwh=tuple(d["da_usd_mwh"]),
                          rt_usd_mwh=tuple(d["rt_usd_mwh"]),
                          res_usd_mw=tuple(d["res_usd_mw"]))


def _parse_header(header, path):
    """Returns the constant reserve price, or None when given per row."""
    cells = [h.strip() for h in header]
    if cells == CSV_HEADER:
        return None
    last = cells[-1]
    if cells[:-1] == CSV_HEADER[:-1] and last.startswith("res_usd_mw="):
        try:
            return float(last.split("=", 1)[1])
        except ValueError:
            raise DataParseError(f"{path}: bad reserve fallback {last!r}", row=1) from None
    raise DataParseError(f"{path}: expected header {','.join(CSV_HEADER)}", row=1)


def load_history(path, site_id: str) -> HistoricalRecord:
    """Load the contiguous hourly record for one site; gaps are rejected."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataParseError(f"{path}: empty history file") from None
        res_fallback = _parse_header(header, path)
        n_fields = len(CSV_HEADER) if res_fallback is None else len(CSV_HEADER) - 1
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != n_fields:
                raise DataParseError(f"{path}: expected {n_fields} fields", row=row_no)
            if row[0].strip() != site_id:
                continue
            try:
                res = res_fallback if res_fallback is not None else float(row[5])
                rows.append((parse_ts(row[1].strip()), float(row[2]), float(row[3]),
                             float(row[4]), res))
            except ValueError as exc:
                raise DataParseError(f"{path}: {exc}", row=row_no) from None

    if not rows:
        raise DataParseError(f"{path}: no rows for site {site_id!r}")
    rows.sort(key=lambda r: r[0])
    expected = rows[0][0]
    for ts, *_ in rows:
        if ts != expected:
            raise GapError(f"site {site_id!r}: missing hour {format_ts(expected)}")
        expected += timedelta(hours=1)

    return HistoricalRecord(
        site_id=site_id, start_utc=format_ts(rows[0][0]),
        wind_ms=tuple(r[1] for r in rows), da_usd_mwh=tuple(r[2] for r in rows),
        rt_usd_mwh=tuple(r[3] for r in rows), res_usd_mw=tuple(r[4] for r in rows))


def write_history(path, record: HistoricalRecord) -> None:
    start = parse_ts(record.start_utc)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for i in range(record.n_hours):
            writer.writerow([record.site_id, format_ts(start + timedelta(hours=i)),
                             repr(record.wind_ms[i]), repr(record.da_usd_mwh[i]),
                             repr(record.rt_usd_mwh[i]), repr(record.res_usd_mw[i])])


def slice_days(record: HistoricalRecord, curve: PowerCurve = DEFAULT_CURVE) -> List[DayProfile]:
    """Cut an aligned record into per-day profiles, converting speed to factor."""
    start = parse_ts(record.start_utc)
    days = []
    for d in range(record.n_days):
        lo, hi = 24 * d, 24 * (d + 1)
        days.append(DayProfile(
            date=(start + timedelta(days=d)).strftime("%Y-%m-%d"),
            wind_factor=tuple(wind_to_power(v, curve) for v in record.wind_ms[lo:hi]),
            da_usd_mwh=tuple(record.da_usd_mwh[lo:hi]),
            rt_usd_mwh=tuple(record.rt_usd_mwh[lo:hi]),
            res_usd_mw=tuple(record.res_usd_mw[lo:hi])))
    return days
