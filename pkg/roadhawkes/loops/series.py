# roadhawkes/loops/series.py
"""
Loop-sensor time series.

A loop file is a long table, one row per loop and minute:

    t_min,loop_id,pos_m,speed_kmh,flow_vpm,occ_pct

t_min counts minutes from the same origin as the event catalog (set with
#anchor= or #origin= comments). Loops are numbered by increasing position,
which is the direction of travel, so loop i-1 is upstream of loop i.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
import pandas as pd
from pandas.api.typing import DataFrameGroupBy

from roadhawkes.errors import LocalizationError
from roadhawkes.io import write_atomic
from roadhawkes.process.catalog import (
    MINUTES_PER_DAY,
    MINUTES_PER_WEEK,
    parse_anchor,
    parse_header_comments,
)

log = logging.getLogger(__name__)

LOOP_HEADER = ("t_min", "loop_id", "pos_m", "speed_kmh", "flow_vpm", "occ_pct")
VARIABLES = ("speed", "flow", "occ")
_RENAME = {"speed_kmh": "speed", "flow_vpm": "flow", "occ_pct": "occ"}

MIN_CELL_SAMPLES = 4


@dataclass(frozen=True, eq=False)
class LoopSeries:
    """One loop: its position and a minute-indexed frame of speed, flow, occ."""

    loop_id: str
    position: float
    frame: pd.DataFrame

    def __len__(self) -> int:
        return len(self.frame)


@dataclass(frozen=True, eq=False)
class LoopNetwork:
    loops: tuple[LoopSeries, ...]
    origin: float = 0.0

    def __post_init__(self) -> None:
        pos = [lp.position for lp in self.loops]
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise LocalizationError("loop positions must be strictly increasing")

    def __len__(self) -> int:
        return len(self.loops)

    def __iter__(self) -> Iterator[LoopSeries]:
        return iter(self.loops)

    def __getitem__(self, k: int) -> LoopSeries:
        return self.loops[k]

    @property
    def positions(self) -> np.ndarray:
        return np.array([lp.position for lp in self.loops], dtype=np.float64)

    @classmethod
    def from_frame(cls, df: pd.DataFrame, origin: float = 0.0) -> "LoopNetwork":
        """
        Build from a long frame with columns t, loop_id, pos and the three
        variables. Each loop is reindexed onto one common minute clock so
        missing minutes become NaN.
        """
        if df.empty:
            raise LocalizationError("no loop data")
        lo, hi = int(df["t"].min()), int(df["t"].max())
        clock = pd.RangeIndex(lo, hi + 1, name="t")
        loops = []
        for loop_id, grp in df.groupby("loop_id", sort=False):
            positions = grp["pos"].unique()
            if positions.size != 1:
                raise LocalizationError(f"loop {loop_id!r} reports {positions.size} positions")
            if grp["t"].duplicated().any():
                raise LocalizationError(f"loop {loop_id!r} has repeated minutes")
            frame = grp.set_index("t")[list(VARIABLES)].sort_index().reindex(clock)
            loops.append(LoopSeries(str(loop_id), float(positions[0]), frame))
        loops.sort(key=lambda lp: lp.position)
        return cls(tuple(loops), origin)

    def to_frame(self) -> pd.DataFrame:
        parts = []
        for lp in self.loops:
            f = lp.frame.dropna(how="all").reset_index()
            f.insert(1, "loop_id", lp.loop_id)
            f.insert(2, "pos", lp.position)
            parts.append(f)
        return pd.concat(parts, ignore_index=True)


def load_loops(path: Path) -> LoopNetwork:
    p = Path(path)
    if not p.is_file():
        raise LocalizationError(f"no such loop file: {p}")
    with p.open(encoding="utf-8") as fp:
        comments = [ln for ln in fp if ln.lstrip().startswith("#")]
    header = parse_header_comments(comments)
    origin = 0.0
    if "anchor" in header:
        origin = parse_anchor(header["anchor"])
    if "origin" in header:
        origin = float(header["origin"])

    df = pd.read_csv(p, comment="#", dtype={"loop_id": str})
    missing = [c for c in LOOP_HEADER if c not in df.columns]
    if missing:
        raise LocalizationError(f"{p}: loop file lacks columns {', '.join(missing)}")
    t = df["t_min"].to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(t)) or np.any(t != np.round(t)):
        raise LocalizationError(f"{p}: t_min must be whole minutes")
    df = df.rename(columns=_RENAME).rename(columns={"t_min": "t", "pos_m": "pos"})
    df["t"] = df["t"].astype(np.int64)
    net = LoopNetwork.from_frame(df[["t", "loop_id", "pos", *VARIABLES]], origin)
    log.info("loaded %d loops from %s", len(net), p)
    return net


def save_loops(network: LoopNetwork, path: Path) -> None:
    df = network.to_frame().rename(
        columns={"t": "t_min", "pos": "pos_m", **{v: k for k, v in _RENAME.items()}}
    )
    body = df[list(LOOP_HEADER)].to_csv(index=False, lineterminator="\n", float_format="%r")
    write_atomic(Path(path), f"#origin={network.origin!r}\n" + body)


# ---------- smoothing and seasonal profiles ----------


def rolling_average(series: pd.Series, window: int = 5) -> pd.Series:
    """Trailing mean over the last `window` minutes; NaN samples are skipped."""
    if window < 1:
        raise LocalizationError(f"rolling window must be >= 1, got {window}")
    if len(series) == 0:
        raise LocalizationError("cannot smooth an empty series")
    return series.rolling(window, min_periods=1).mean()


def clock_keys(t: np.ndarray | pd.Index, origin: float) -> tuple[np.ndarray, np.ndarray]:
    """(weekday, minute of day) for each minute t; weekday 0 is Monday."""
    week = np.mod(origin + np.asarray(t, dtype=np.float64), MINUTES_PER_WEEK)
    weekday = (week // MINUTES_PER_DAY).astype(np.int64)
    minute = np.floor(np.mod(week, MINUTES_PER_DAY)).astype(np.int64)
    return weekday, minute


def cell_median(values: Sequence[float], min_samples: int = MIN_CELL_SAMPLES) -> float:
    """Median of the present values, NaN with fewer than `min_samples`."""
    s = pd.Series(values, dtype=np.float64).dropna()
    if len(s) < min_samples:
        return float("nan")
    return float(s.median())


def _grouped(frame: pd.DataFrame, origin: float) -> DataFrameGroupBy:
    weekday, minute = clock_keys(frame.index, origin)
    keyed = frame.assign(weekday=weekday, minute=minute)
    return keyed.groupby(["weekday", "minute"])[list(frame.columns)]


def seasonal_profile(
    frame: pd.DataFrame, origin: float = 0.0, min_samples: int = MIN_CELL_SAMPLES
) -> pd.DataFrame:
    """
    Median of every variable per (weekday, minute of day). Cells with fewer
    than `min_samples` present samples are NaN.
    """
    grp = _grouped(frame, origin)
    med = grp.median()
    out: pd.DataFrame = med.where(grp.count() >= min_samples)
    return out


def seasonal_quantiles(
    frame: pd.DataFrame,
    origin: float = 0.0,
    quantiles: Sequence[float] = (0.2, 0.8),
    min_samples: int = MIN_CELL_SAMPLES,
) -> dict[float, pd.DataFrame]:
    """Per-cell quantile tables, one per requested level."""
    grp = _grouped(frame, origin)
    enough = grp.count() >= min_samples
    return {q: grp.quantile(q).where(enough) for q in quantiles}


def seasonal_median(
    frame: pd.DataFrame,
    weekday: int,
    minute: int,
    origin: float = 0.0,
    min_samples: int = MIN_CELL_SAMPLES,
) -> pd.Series:
    """The seasonal median of every variable for one cell."""
    wd, mn = clock_keys(frame.index, origin)
    cell = frame[(wd == weekday) & (mn == minute)]
    return pd.Series(
        {col: cell_median(cell[col].tolist(), min_samples) for col in frame.columns},
        dtype=np.float64,
    )


def profile_lookup(profile: pd.DataFrame, t: pd.Index | np.ndarray, origin: float) -> pd.DataFrame:
    """Rows of `profile` for each minute in t, indexed by t; NaN where unavailable."""
    weekday, minute = clock_keys(t, origin)
    keys = pd.MultiIndex.from_arrays([weekday, minute], names=["weekday", "minute"])
    out = profile.reindex(keys)
    out.index = pd.Index(np.asarray(t), name="t")
    return out
