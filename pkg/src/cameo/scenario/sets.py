"""Random representative-day scenario sets (uniform probabilities).

Set i of a batch is drawn with an independent sub-seed derived from the
base seed, sampling day indices uniformly without replacement, so batches
are reproducible and individual sets are decoupled.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from ..errors import InsufficientDataError
from ..payload import derive_seed
from ..data.history import DayProfile, HistoricalRecord, slice_days
from ..data.powercurve import DEFAULT_CURVE, PowerCurve


@dataclass(frozen=True)
class ScenarioSet:
    set_id: str
    site_id: str
    seed: int
    days: tuple                      # DayProfile each with probability 1/k
    k: int

    def __post_init__(self):
        if self.k < 1 or len(self.days) != self.k:
            raise InsufficientDataError("scenario set must hold k >= 1 days")

    @property
    def probability(self) -> float:
        return 1.0 / self.k

    def to_dict(self) -> dict:
        return {"set_id": self.set_id, "site_id": self.site_id, "seed": self.seed,
                "k": self.k,
                "days": [d.to_dict() if isinstance(d, DayProfile) else dict(d)
                         for d in self.days]}

    @staticmethod
    def from_dict(d) -> "ScenarioSet":
        # days shorter than a full day (hand-checkable instances) stay raw dicts;
        # pipeline data always carries 24-hour profiles
        days = []
        for x in d["days"]:
            if len(x.get("wind_factor", ())) == 24:
                days.append(DayProfile.from_dict(x))
            else:
                days.append(dict(x))
        return ScenarioSet(set_id=d["set_id"], site_id=d["site_id"], seed=d["seed"],
                           days=tuple(days), k=d["k"])


def sample_scenario_sets(history: HistoricalRecord, n_sets: int, n_days: int,
                         seed: int, curve: PowerCurve = DEFAULT_CURVE) -> List[ScenarioSet]:
    """Draw `n_sets` scenario sets of `n_days` distinct days each."""
    if n_days < 1 or n_sets < 1:
        raise InsufficientDataError("n_sets and n_days must be >= 1")
    if history.n_days < n_days:
        raise InsufficientDataError(
            f"history has {history.n_days} days, need at least {n_days}")

    all_days = slice_days(history, curve)
    sets = []
    for i in range(n_sets):
        rng = np.random.default_rng(derive_seed(seed, i))
        picks = rng.choice(history.n_days, size=n_days, replace=False)
        sets.append(ScenarioSet(
            set_id=f"{history.site_id}-set{i:02d}",
            site_id=history.site_id, seed=seed,
            days=tuple(all_days[int(j)] for j in picks), k=n_days))
    return sets
