"""Wind farm site records and the sites.csv loader."""

import csv
from dataclasses import dataclass

from ..errors import DataParseError, RangeError

CSV_HEADER = ["site_id", "name", "lon", "lat", "capacity_mw", "interconnect_mw"]


@dataclass(frozen=True)
class WindFarmSite:
    site_id: str
    name: str
    lon: float
    lat: float
    capacity_mw: float
    interconnect_mw: float

    def __post_init__(self):
        if not -180.0 <= self.lon <= 180.0:
            raise RangeError(f"site {self.site_id!r}: longitude {self.lon} out of [-180, 180]")
        if not -90.0 <= self.lat <= 90.0:
            raise RangeError(f"site {self.site_id!r}: latitude {self.lat} out of [-90, 90]")
        if not self.capacity_mw > 0:
            raise RangeError(f"site {self.site_id!r}: capacity must be positive")
        if not self.interconnect_mw > 0:
            raise RangeError(f"site {self.site_id!r}: interconnection limit must be positive")

    def to_dict(self) -> dict:
        return {"site_id": self.site_id, "name": self.name,
                "lon": self.lon, "lat": self.lat,
                "capacity_mw": self.capacity_mw,
                "interconnect_mw": self.interconnect_mw}

    @staticmethod
    def from_dict(d: dict) -> "WindFarmSite":
        return WindFarmSite(site_id=d["site_id"], name=d["name"],
                            lon=float(d["lon"]), lat=float(d["lat"]),
                            capacity_mw=float(d["capacity_mw"]),
                            interconnect_mw=float(d["interconnect_mw"]))


def load_sites(path) -> list:
    """Load wind farm sites from a CSV file (one site per data row)."""
    sites = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataParseError(f"{path}: empty sites file") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise DataParseError(f"{path}: expected header {','.join(CSV_HEADER)}", row=1)
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(CSV_HEADER):
                raise DataParseError(f"{path}: expected {len(CSV_HEADER)} fields, "
                                     f"got {len(row)}", row=row_no)
            try:
                site = WindFarmSite(
                    site_id=row[0].strip(), name=row[1].strip(),
                    lon=float(row[2]), lat=float(row[3]),
                    capacity_mw=float(row[4]), interconnect_mw=float(row[5]))
            except ValueError as exc:
                raise DataParseError(f"{path}: {exc}", row=row_no) from None
            except RangeError as exc:
                raise RangeError(f"{path}, row {row_no}: {exc}") from None
            sites.append(site)
    return sites


def write_sites(path, sites) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for s in sites:
            writer.writerow([s.site_id, s.name, repr(s.lon), repr(s.lat),
                             repr(s.capacity_mw), repr(s.interconnect_mw)])
