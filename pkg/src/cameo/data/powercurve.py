"""Idealized turbine power curve: cut-in / rated / cut-out with cubic ramp."""

from dataclasses import dataclass

from ..errors import RangeError


@dataclass(frozen=True)
class PowerCurve:
    cut_in_ms: float = 3.0
    rated_ms: float = 12.0
    cut_out_ms: float = 25.0

    def __post_init__(self):
        if not 0 < self.cut_in_ms < self.rated_ms < self.cut_out_ms:
            raise RangeError("power curve requires 0 < cut-in < rated < cut-out")

    def to_dict(self) -> dict:
        return {"cut_in_ms": self.cut_in_ms, "rated_ms": self.rated_ms,
                "cut_out_ms": self.cut_out_ms}

    @staticmethod
    def from_dict(d) -> "PowerCurve":
        return PowerCurve(float(d["cut_in_ms"]), float(d["rated_ms"]), float(d["cut_out_ms"]))


DEFAULT_CURVE = PowerCurve()


def wind_to_power(speed_ms: float, curve: PowerCurve = DEFAULT_CURVE) -> float:
    """Convert wind speed to a power factor in [0, 1].

    Zero below cut-in and at/above cut-out, one on [rated, cut-out), and a
    cubic ramp (v^3 - v_ci^3) / (v_r^3 - v_ci^3) in between.
    """
    v = float(speed_ms)
    if v < curve.cut_in_ms or v >= curve.cut_out_ms:
        return 0.0
    if v >= curve.rated_ms:
        return 1.0
    num = v ** 3 - curve.cut_in_ms ** 3
    den = curve.rated_ms ** 3 - curve.cut_in_ms ** 3
    return num / den
