"""Seeded synthetic wind/price histories for demos and self-contained tests.

Not a statistical model of any real market: diurnal sinusoids set the
daily shape (day-ahead prices peak in the evening), AR(1) noise adds
persistence to wind speed and the real-time/day-ahead spread, and
everything is clipped to physical ranges.  Identical (site, seed,
n_days) inputs yield byte-identical records.
"""

import numpy as np

from ..payload import derive_seed
from .history import HistoricalRecord
from .sites import WindFarmSite


def _ar1(rng, n, phi, sigma):
    out = np.empty(n)
    x = rng.normal(0.0, sigma / max(1e-9, np.sqrt(1 - phi * phi)))
    for i in range(n):
        x = phi * x + rng.normal(0.0, sigma)
        out[i] = x
    return out


def generate_synthetic_history(site: WindFarmSite, seed: int, n_days: int) -> HistoricalRecord:
    """Generate a deterministic hourly history of `n_days` whole days."""
    if n_days < 1:
        raise ValueError("n_days must be >= 1")
    rng = np.random.default_rng(derive_seed(seed, "history", site.site_id))
    n = 24 * n_days
    hour = np.arange(n) % 24

    # per-site flavor so the five demo sites are not clones; reserve prices
    # sit well below amortized battery cost so capacity is not free money
    wind_mean = 5.6 + 2.0 * rng.random()
    da_base = 38.0 + 10.0 * rng.random()
    da_swing = 16.0 + 8.0 * rng.random()
    res_base = 0.45 + 0.25 * rng.random()

    wind_diurnal = 2.5 * np.cos(2 * np.pi * (hour - 14) / 24.0)
    wind = wind_mean + wind_diurnal + _ar1(rng, n, phi=0.93, sigma=1.6)
    wind = np.clip(wind, 0.0, 32.0)

    da_diurnal = da_swing * np.cos(2 * np.pi * (hour - 19) / 24.0)
    da = da_base + da_diurnal + _ar1(rng, n, phi=0.7, sigma=3.0)
    da = np.clip(da, 1.0, None)

    spread = _ar1(rng, n, phi=0.6, sigma=5.0)
    rt = np.clip(da + spread, 0.5, None)

    res = res_base + 0.2 * np.cos(2 * np.pi * (hour - 18) / 24.0) + _ar1(rng, n, phi=0.5, sigma=0.15)
    res = np.clip(res, 0.05, None)

    return HistoricalRecord(
        site_id=site.site_id, start_utc="2020-01-01T00:00:00Z",
        wind_ms=tuple(float(v) for v in wind),
        da_usd_mwh=tuple(float(v) for v in da),
        rt_usd_mwh=tuple(float(v) for v in rt),
        res_usd_mw=tuple(float(v) for v in res))
