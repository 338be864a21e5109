# roadhawkes/loops/synthetic.py
"""
Synthetic loop data: a seasonal base with Gaussian noise, optionally with
a planted incident that slows and fills the loops just upstream of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from roadhawkes.errors import LocalizationError
from roadhawkes.loops.series import LoopNetwork, clock_keys
from roadhawkes.process.catalog import MINUTES_PER_WEEK

SPEED_NOISE = 5.0
OCC_NOISE = 3.0
FLOW_NOISE = 2.0


@dataclass(frozen=True)
class PlantedIncident:
    """
    An incident between loops `downstream - 1` and `downstream`, active on
    [t_start, t_end]. The `queue_loops` loops upstream of it drop by
    `speed_drop` km/h and gain `occ_rise` occupancy points.
    """

    downstream: int
    t_start: float
    t_end: float
    speed_drop: float = 30.0
    occ_rise: float = 20.0
    queue_loops: int = 1

    def __post_init__(self) -> None:
        if self.downstream < 1:
            raise LocalizationError("an incident needs a loop upstream of it")
        if self.queue_loops < 1:
            raise LocalizationError("queue must reach at least one loop")


def _bump(m: np.ndarray, center: float, width: float) -> np.ndarray:
    out: np.ndarray = np.exp(-0.5 * ((m - center) / width) ** 2)
    return out


def seasonal_base(minute_of_day: np.ndarray, weekday: np.ndarray) -> dict[str, np.ndarray]:
    """Noise-free speed, flow and occupancy with weekday rush hours."""
    m = np.asarray(minute_of_day, dtype=np.float64)
    rush = np.where(np.asarray(weekday) < 5, 1.0, 0.3)
    peaks = _bump(m, 480.0, 60.0) + 0.8 * _bump(m, 1050.0, 75.0)
    return {
        "speed": 105.0 - 25.0 * rush * peaks,
        "flow": 20.0 + 15.0 * rush * peaks,
        "occ": 8.0 + 14.0 * rush * peaks,
    }


def history_minutes(weeks: int, start: int, stop: int) -> np.ndarray:
    """Minutes [start, stop) of the week, repeated for `weeks` weeks."""
    base = np.arange(start, stop, dtype=np.int64)
    week = int(MINUTES_PER_WEEK)
    return np.concatenate([base + w * week for w in range(weeks)])


def synthetic_frame(
    positions: Sequence[float],
    minutes: np.ndarray,
    rng: np.random.Generator,
    incident: Optional[PlantedIncident] = None,
    origin: float = 0.0,
) -> pd.DataFrame:
    t = np.asarray(minutes, dtype=np.int64)
    weekday, minute = clock_keys(t, origin)
    base = seasonal_base(minute, weekday)
    parts = []
    for k, pos in enumerate(positions):
        speed = base["speed"] + rng.normal(0.0, SPEED_NOISE, t.size)
        flow = base["flow"] + rng.normal(0.0, FLOW_NOISE, t.size)
        occ = base["occ"] + rng.normal(0.0, OCC_NOISE, t.size)
        if incident is not None and (
            incident.downstream - incident.queue_loops <= k < incident.downstream
        ):
            active = (t >= incident.t_start) & (t <= incident.t_end)
            speed = np.where(active, speed - incident.speed_drop, speed)
            occ = np.where(active, occ + incident.occ_rise, occ)
        parts.append(
            pd.DataFrame(
                {
                    "t": t,
                    "loop_id": f"L{k:02d}",
                    "pos": float(pos),
                    "speed": np.maximum(speed, 0.0),
                    "flow": np.maximum(flow, 0.0),
                    "occ": np.clip(occ, 0.0, 100.0),
                }
            )
        )
    return pd.concat(parts, ignore_index=True)


def synthetic_network(
    positions: Sequence[float],
    minutes: np.ndarray,
    rng: np.random.Generator,
    incident: Optional[PlantedIncident] = None,
    origin: float = 0.0,
) -> LoopNetwork:
    return LoopNetwork.from_frame(synthetic_frame(positions, minutes, rng, incident, origin), origin)
