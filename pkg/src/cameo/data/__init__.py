from .sites import WindFarmSite, load_sites, write_sites
from .history import (
    DayProfile, HistoricalRecord, load_history, slice_days, write_history,
)
from .batteries import BatteryConfig, load_battery_catalog, write_battery_catalog
from .powercurve import DEFAULT_CURVE, PowerCurve, wind_to_power
from .synthetic import generate_synthetic_history

__all__ = [
    "WindFarmSite", "load_sites", "write_sites",
    "DayProfile", "HistoricalRecord", "load_history", "slice_days", "write_history",
    "BatteryConfig", "load_battery_catalog", "write_battery_catalog",
    "DEFAULT_CURVE", "PowerCurve", "wind_to_power",
    "generate_synthetic_history",
]
