"""Battery catalogs: explicit entries or a factored chemistry/duration/rating grid.

batteries.json, factored form::

    {"chemistries": ["alpha", "beta"],
     "durations_h": [2, 4, 6, 8],
     "ratings_mw": [100, 1000],
     "cost_usd_per_kw": {"alpha": 450.0, "beta": 250.0},
     "rte": {"alpha": 0.92, "beta": 0.8}}

cost_usd_per_kw / rte may be scalars (applied to every chemistry) or
per-chemistry maps.  Explicit form: {"configs": [ {config fields...} ]}.
"""

import json
from dataclasses import dataclass

from ..errors import DataParseError, RangeError


@dataclass(frozen=True)
class BatteryConfig:
    config_id: str
    chemistry: str
    duration_h: float
    rating_mw: float
    cost_usd_per_kw: float
    rte: float

    def __post_init__(self):
        if not self.duration_h > 0:
            raise RangeError(f"battery {self.config_id!r}: duration must be positive")
        if not self.rating_mw > 0:
            raise RangeError(f"battery {self.config_id!r}: power rating must be positive")
        if self.cost_usd_per_kw < 0:
            raise RangeError(f"battery {self.config_id!r}: cost must be non-negative")
        if not 0 < self.rte <= 1:
            raise RangeError(f"battery {self.config_id!r}: round-trip efficiency "
                             f"must be in (0, 1]")

    def to_dict(self) -> dict:
        return {"config_id": self.config_id, "chemistry": self.chemistry,
                "duration_h": self.duration_h, "rating_mw": self.rating_mw,
                "cost_usd_per_kw": self.cost_usd_per_kw, "rte": self.rte}

    @staticmethod
    def from_dict(d) -> "BatteryConfig":
        return BatteryConfig(config_id=d["config_id"], chemistry=d["chemistry"],
                             duration_h=float(d["duration_h"]), rating_mw=float(d["rating_mw"]),
                             cost_usd_per_kw=float(d["cost_usd_per_kw"]), rte=float(d["rte"]))


def _num(x):
    return float(x) if isinstance(x, float) else int(x)


def config_id_for(chemistry, duration_h, rating_mw) -> str:
    return f"{chemistry}_{_num(duration_h):g}h_{_num(rating_mw):g}mw"


def _per_chemistry(value, chemistry, key):
    if isinstance(value, dict):
        if chemistry not in value:
            raise DataParseError(f"catalog {key} map missing chemistry {chemistry!r}")
        return float(value[chemistry])
    return float(value)


def load_battery_catalog(path) -> list:
    """Expand a catalog file into BatteryConfig entries (declared order)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataParseError(f"{path}: {exc.msg}", row=exc.lineno) from None

    if "configs" in doc:
        return [BatteryConfig.from_dict(entry) for entry in doc["configs"]]

    for key in ("chemistries", "durations_h", "ratings_mw", "cost_usd_per_kw", "rte"):
        if key not in doc:
            raise DataParseError(f"{path}: factored catalog missing {key!r}")

    configs = []
    for chem in doc["chemistries"]:
        cost = _per_chemistry(doc["cost_usd_per_kw"], chem, "cost_usd_per_kw")
        rte = _per_chemistry(doc["rte"], chem, "rte")
        for duration in doc["durations_h"]:
            for rating in doc["ratings_mw"]:
                configs.append(BatteryConfig(
                    config_id=config_id_for(chem, duration, rating),
                    chemistry=chem, duration_h=float(duration), rating_mw=float(rating),
                    cost_usd_per_kw=cost, rte=rte))
    return configs


def write_battery_catalog(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
