# roadhawkes/loops/localizer.py
"""
Placing an incident between two loops.

Residuals are measured minus seasonal median, after a 5 minute trailing
mean. For the adjacent pair (i-1, i), with i-1 upstream,

    dRS_i = RS_i - RS_{i-1}
    dRO_i = RO_i - RO_{i-1}
    EIS_i = dRS_i - dRO_i

An incident between the two loops slows and fills the upstream loop while
the downstream one stays near normal, so dRS_i > 0, dRO_i < 0 and EIS_i is
large. Shifts common to both loops cancel. The event is placed halfway
between the pair with the largest score over the window.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Literal, Optional

import numpy as np
import pandas as pd

from roadhawkes.errors import LocalizationError
from roadhawkes.loops.series import (
    LoopNetwork,
    profile_lookup,
    rolling_average,
    seasonal_profile,
)

log = logging.getLogger(__name__)

Aggregate = Literal["max", "top5"]
WINDOW_HEADER = ("t_start", "t_end", "x_lo", "x_hi")
SMOOTHING_MINUTES = 5


@dataclass(frozen=True)
class EventWindow:
    t_start: float
    t_end: float
    x_lo: float
    x_hi: float
    members: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.x_lo < self.x_hi:
            raise LocalizationError(f"window needs x_lo < x_hi, got [{self.x_lo}, {self.x_hi}]")
        if not self.t_start < self.t_end:
            raise LocalizationError(
                f"window needs t_start < t_end, got [{self.t_start}, {self.t_end}]"
            )

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.x_lo + self.x_hi)

    def minutes(self) -> pd.RangeIndex:
        return pd.RangeIndex(math.ceil(self.t_start), math.floor(self.t_end) + 1, name="t")


def select_members(window: EventWindow, network: LoopNetwork) -> EventWindow:
    """
    The loops inside the link plus the nearest loop beyond each end, so an
    incident right at a link boundary still has a pair around it.
    """
    pos = network.positions
    inside = np.flatnonzero((pos >= window.x_lo) & (pos <= window.x_hi))
    below = np.flatnonzero(pos < window.x_lo)
    above = np.flatnonzero(pos > window.x_hi)
    idx = sorted(
        set(inside.tolist())
        | ({int(below[-1])} if below.size else set())
        | ({int(above[0])} if above.size else set())
    )
    if len(idx) < 2:
        raise LocalizationError(
            f"window [{window.x_lo}, {window.x_hi}] covers {len(idx)} loop(s); need 2"
        )
    return replace(window, members=tuple(idx))


def load_windows(path: Path) -> list[EventWindow]:
    p = Path(path)
    if not p.is_file():
        raise LocalizationError(f"no such window file: {p}")
    df = pd.read_csv(p, comment="#")
    missing = [c for c in WINDOW_HEADER if c not in df.columns]
    if missing:
        raise LocalizationError(f"{p}: window file lacks columns {', '.join(missing)}")
    return [
        EventWindow(float(r.t_start), float(r.t_end), float(r.x_lo), float(r.x_hi))
        for r in df.itertuples(index=False)
    ]


@dataclass(frozen=True, eq=False)
class Residuals:
    """Speed and occupancy residuals, minutes by member loop."""

    speed: pd.DataFrame
    occ: pd.DataFrame


def residuals(
    window: EventWindow,
    network: LoopNetwork,
    profiles: Optional[dict[int, pd.DataFrame]] = None,
) -> Residuals:
    minutes = window.minutes()
    rs, ro = {}, {}
    for k in window.members:
        lp = network[k]
        prof = (profiles or {}).get(k)
        if prof is None:
            prof = seasonal_profile(lp.frame, network.origin)
        med = profile_lookup(prof, minutes, network.origin)
        speed = rolling_average(lp.frame["speed"], SMOOTHING_MINUTES).reindex(minutes)
        occ = rolling_average(lp.frame["occ"], SMOOTHING_MINUTES).reindex(minutes)
        rs[k] = speed - med["speed"]
        ro[k] = occ - med["occ"]
    return Residuals(pd.DataFrame(rs, index=minutes), pd.DataFrame(ro, index=minutes))


@dataclass(frozen=True, eq=False)
class PairScores:
    """
    One column per adjacent member pair, keyed by the downstream loop's
    index: per-minute EIS and dRS, and the window aggregates.
    """

    eis: pd.DataFrame
    drs: pd.DataFrame
    score: pd.Series
    asymmetry: pd.Series
    pairs: tuple[tuple[int, int], ...]


def _aggregate(values: pd.DataFrame, how: Aggregate) -> pd.Series:
    if how == "max":
        return values.max(axis=0, skipna=True)
    if how == "top5":
        return values.apply(lambda c: c.dropna().nlargest(5).mean(), axis=0)
    raise LocalizationError(f"unknown aggregation {how!r}")


def event_impact_scores(
    window: EventWindow,
    network: LoopNetwork,
    profiles: Optional[dict[int, pd.DataFrame]] = None,
    aggregate: Aggregate = "max",
) -> PairScores:
    if len(window.members) < 2:
        window = select_members(window, network)
    res = residuals(window, network, profiles)
    have = [k for k in window.members if res.speed[k].notna().any() and res.occ[k].notna().any()]
    if len(have) < 2:
        raise LocalizationError(f"only {len(have)} loop(s) have data in the window")

    members = window.members
    pairs = tuple(zip(members[:-1], members[1:]))
    eis, drs = {}, {}
    for up, down in pairs:
        d_rs = res.speed[down] - res.speed[up]
        d_ro = res.occ[down] - res.occ[up]
        drs[down] = d_rs
        eis[down] = d_rs - d_ro
    eis_df = pd.DataFrame(eis)
    drs_df = pd.DataFrame(drs)
    return PairScores(
        eis=eis_df,
        drs=drs_df,
        score=_aggregate(eis_df, aggregate),
        asymmetry=_aggregate(drs_df, aggregate),
        pairs=pairs,
    )


@dataclass(frozen=True)
class Localization:
    position: float
    pair: Optional[tuple[int, int]]
    score: float
    low_confidence: bool
    scores: tuple[float, ...] = field(default=(), compare=False)


def localize(
    window: EventWindow,
    network: LoopNetwork,
    profiles: Optional[dict[int, pd.DataFrame]] = None,
    aggregate: Aggregate = "max",
) -> Localization:
    """
    Midpoint of the best-scoring adjacent pair. Equal scores go to the
    larger dRS, then to the upstream-most pair.

    Only positive scores count as evidence: a pair scoring zero or less
    shows no queue building upstream of it, so it is treated like a pair
    with no score at all. Without any positive score the window midpoint
    is returned and flagged low-confidence. A window holding a single pair
    returns that pair whatever its score.
    """
    if len(window.members) < 2:
        window = select_members(window, network)
    pos = network.positions
    ps = event_impact_scores(window, network, profiles, aggregate)
    raw = [float(ps.score[down]) for _, down in ps.pairs]

    if len(ps.pairs) == 1:
        up, down = ps.pairs[0]
        s = raw[0]
        return Localization(
            float(0.5 * (pos[up] + pos[down])), (up, down), s, not (s > 0), tuple(raw)
        )

    best: Optional[int] = None
    for k, (_, down) in enumerate(ps.pairs):
        s = raw[k]
        if not (math.isfinite(s) and s > 0):
            continue
        if best is None:
            best = k
            continue
        b = raw[best]
        if s > b or (s == b and ps.asymmetry[down] > ps.asymmetry[ps.pairs[best][1]]):
            best = k

    if best is None:
        log.info("no pair scores above zero in [%s, %s]; using the link midpoint",
                 window.t_start, window.t_end)
        return Localization(window.midpoint, None, float("nan"), True, tuple(raw))
    up, down = ps.pairs[best]
    return Localization(
        float(0.5 * (pos[up] + pos[down])), (up, down), raw[best], False, tuple(raw)
    )


# ---------- significance ----------


@dataclass(frozen=True)
class Significance:
    max_drop_pct: float
    kept: bool


def significance_filter(
    speed: pd.Series,
    median: pd.Series,
    threshold_pct: float,
    window: tuple[float, float],
) -> Significance:
    """
    Largest percentage drop of measured speed below the seasonal median
    within the window. Kept when that drop reaches `threshold_pct`.
    """
    if not 0.0 <= threshold_pct < 100.0:
        raise LocalizationError(f"threshold must lie in [0, 100), got {threshold_pct!r}")
    t0, t1 = window
    both = pd.concat({"m": speed, "med": median}, axis=1)
    both = both[(both.index >= t0) & (both.index <= t1)].dropna()
    both = both[both["med"] > 0]
    if both.empty:
        raise LocalizationError(f"no usable speed data in [{t0}, {t1}]")
    drop = float((100.0 * (both["med"] - both["m"]) / both["med"]).max())
    return Significance(drop, drop >= threshold_pct)


def link_speed(
    window: EventWindow,
    network: LoopNetwork,
    profiles: Optional[dict[int, pd.DataFrame]] = None,
) -> tuple[pd.Series, pd.Series]:
    """Mean smoothed speed and mean seasonal median over the member loops."""
    if len(window.members) < 2:
        window = select_members(window, network)
    minutes = window.minutes()
    speeds, meds = [], []
    for k in window.members:
        lp = network[k]
        prof = (profiles or {}).get(k)
        if prof is None:
            prof = seasonal_profile(lp.frame, network.origin)
        speeds.append(rolling_average(lp.frame["speed"], SMOOTHING_MINUTES).reindex(minutes))
        meds.append(profile_lookup(prof, minutes, network.origin)["speed"])
    return pd.concat(speeds, axis=1).mean(axis=1), pd.concat(meds, axis=1).mean(axis=1)


def network_profiles(network: LoopNetwork) -> dict[int, pd.DataFrame]:
    """Seasonal profile of every loop, computed once for many windows."""
    return {k: seasonal_profile(lp.frame, network.origin) for k, lp in enumerate(network)}
