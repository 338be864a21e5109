# roadhawkes/process/catalog.py
"""
Events, the study domain and the fitting configuration.

Time is in minutes, space in meters along the carriageway in the direction
of travel, intensities in events per minute per meter. A catalog keeps its
events as two read-only float arrays sorted by time, ties broken by
position.

Event CSV::

    #T=129600
    #X=180000
    #anchor=mon,00:00
    t_min,x_m
    5.0,200.0
    10.0,500.0

Comment lines start with ``#``. ``key=value`` comments set domain fields
(``T``, ``X``, ``ring``, ``origin`` or ``anchor``); any other comment is
ignored. Columns after ``x_m`` (for example ``gen,parent`` written by the
simulator) are ignored on load.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Iterator, Mapping, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from roadhawkes.errors import CatalogError, ConfigError
from roadhawkes.io import render_csv, write_atomic

log = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

MINUTES_PER_DAY = 1440.0
MINUTES_PER_WEEK = 10080.0

WEEKDAYS = ("mon", "tue", "wed", "thu", "fri", "sat", "sun")

HEADER = ("t_min", "x_m")


@dataclass(frozen=True)
class Event:
    t: float
    x: float


@dataclass(frozen=True)
class StudyDomain:
    """
    The observation window [0, T] x [0, X].

    `origin` places t = 0 on the weekly clock: it is the number of minutes
    from a Monday 00:00 to the start of the window.
    """

    T: float
    X: float
    m_d: float = MINUTES_PER_DAY
    m_w: float = MINUTES_PER_WEEK
    spatial_is_ring: bool = False
    origin: float = 0.0

    def __post_init__(self) -> None:
        for name in ("T", "X", "m_d", "m_w"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise CatalogError(f"domain {name} must be positive, got {v!r}")
        if not math.isclose(self.m_w, 7 * self.m_d, rel_tol=1e-12):
            raise CatalogError(f"m_w must be 7*m_d, got m_d={self.m_d}, m_w={self.m_w}")
        if not math.isfinite(self.origin):
            raise CatalogError(f"origin must be finite, got {self.origin!r}")

    def daily_phase(self, t: FloatArray | float) -> FloatArray:
        return np.mod(self.origin + np.asarray(t, dtype=np.float64), self.m_d)

    def weekly_phase(self, t: FloatArray | float) -> FloatArray:
        return np.mod(self.origin + np.asarray(t, dtype=np.float64), self.m_w)

    def contains(self, t: float, x: float) -> bool:
        return 0.0 <= t <= self.T and 0.0 <= x <= self.X

    def header_lines(self) -> list[str]:
        return [
            f"T={self.T!r}",
            f"X={self.X!r}",
            f"ring={int(self.spatial_is_ring)}",
            f"origin={self.origin!r}",
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "T": self.T,
            "X": self.X,
            "m_d": self.m_d,
            "m_w": self.m_w,
            "spatial_is_ring": self.spatial_is_ring,
            "origin": self.origin,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "StudyDomain":
        return cls(
            T=float(data["T"]),
            X=float(data["X"]),
            m_d=float(data.get("m_d", MINUTES_PER_DAY)),
            m_w=float(data.get("m_w", MINUTES_PER_WEEK)),
            spatial_is_ring=bool(data.get("spatial_is_ring", False)),
            origin=float(data.get("origin", 0.0)),
        )


def parse_anchor(text: str) -> float:
    """``"tue,08:30"`` -> minutes after Monday 00:00."""
    try:
        day, clock = (s.strip().lower() for s in text.split(","))
        hh, mm = clock.split(":")
        hours, minutes = int(hh), int(mm)
    except ValueError:
        raise CatalogError(f"bad anchor {text!r}, expected <weekday,hh:mm>") from None
    day = day[:3]
    if day not in WEEKDAYS or not (0 <= hours < 24 and 0 <= minutes < 60):
        raise CatalogError(f"bad anchor {text!r}, expected <weekday,hh:mm>")
    return WEEKDAYS.index(day) * MINUTES_PER_DAY + hours * 60.0 + minutes


def parse_header_comments(lines: Sequence[str]) -> dict[str, str]:
    """Collect ``#key=value`` comments; later keys win."""
    out: dict[str, str] = {}
    for line in lines:
        body = line.lstrip("#").strip()
        if "=" in body:
            key, _, value = body.partition("=")
            out[key.strip().lower()] = value.strip()
    return out


def _truthy(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "ring")


def domain_from_header(
    header: Mapping[str, str], domain: Optional[StudyDomain] = None
) -> StudyDomain:
    """
    Merge header comments into `domain`.

    An explicit `domain` fixes T, X and the ring flag; the header may still
    move its origin. Without one, T and X must come from the header.
    """
    origin: Optional[float] = None
    if "anchor" in header:
        origin = parse_anchor(header["anchor"])
    if "origin" in header:
        try:
            origin = float(header["origin"])
        except ValueError:
            raise CatalogError(f"bad origin {header['origin']!r}") from None

    if domain is not None:
        return domain if origin is None else replace(domain, origin=origin)

    try:
        T = float(header["t"])
        X = float(header["x"])
    except KeyError as e:
        raise CatalogError(
            f"no domain given and header lacks #{str(e.args[0]).upper()}=..."
        ) from None
    except ValueError as e:
        raise CatalogError(f"bad domain header: {e}") from None
    return StudyDomain(
        T=T,
        X=X,
        spatial_is_ring=_truthy(header.get("ring", "0")),
        origin=0.0 if origin is None else origin,
    )


def _readonly(a: NDArray[Any]) -> NDArray[Any]:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class EventCatalog:
    domain: StudyDomain
    t: FloatArray
    x: FloatArray

    def __post_init__(self) -> None:
        t = np.array(self.t, dtype=np.float64).reshape(-1)
        x = np.array(self.x, dtype=np.float64).reshape(-1)
        if t.shape != x.shape:
            raise CatalogError(f"t and x lengths differ: {t.size} != {x.size}")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(x))):
            raise CatalogError("catalog has non-finite coordinates")
        order = np.lexsort((x, t))
        object.__setattr__(self, "t", _readonly(t[order]))
        object.__setattr__(self, "x", _readonly(x[order]))

    @classmethod
    def from_events(cls, domain: StudyDomain, events: Sequence[Event]) -> "EventCatalog":
        return cls(
            domain,
            np.array([e.t for e in events], dtype=np.float64),
            np.array([e.x for e in events], dtype=np.float64),
        )

    def __len__(self) -> int:
        return int(self.t.size)

    def __iter__(self) -> Iterator[Event]:
        for t, x in zip(self.t.tolist(), self.x.tolist()):
            yield Event(t, x)

    @property
    def events(self) -> list[Event]:
        return list(self)

    def same_as(self, other: "EventCatalog") -> bool:
        return (
            self.domain == other.domain
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.x, other.x)
        )

    def subset(self, mask: NDArray[np.bool_] | Sequence[bool]) -> "EventCatalog":
        m = np.asarray(mask, dtype=bool)
        if m.shape != self.t.shape:
            raise CatalogError(f"mask length {m.size} != catalog length {len(self)}")
        return EventCatalog(self.domain, self.t[m], self.x[m])

    def window(self, t_start: float, t_end: float) -> "EventCatalog":
        """
        Events with t_start <= t < t_end, re-based to start at 0.

        The domain's origin moves with the window so daily and weekly phases
        are unchanged.
        """
        if not (0.0 <= t_start < t_end <= self.domain.T):
            raise CatalogError(
                f"window [{t_start}, {t_end}) is not inside [0, {self.domain.T}]"
            )
        keep = (self.t >= t_start) & (self.t < t_end)
        if t_end == self.domain.T:
            keep |= self.t == t_end
        dom = replace(
            self.domain, T=t_end - t_start, origin=self.domain.origin + t_start
        )
        return EventCatalog(dom, self.t[keep] - t_start, self.x[keep])

    def restrict_space(self, lo: float, hi: float) -> "EventCatalog":
        """
        Events with lo <= x <= hi, re-based so lo maps to 0.

        On a ring `lo > hi` selects the interval that wraps the seam.
        The result is never a ring.
        """
        X = self.domain.X
        if lo <= hi:
            if not (0.0 <= lo < hi <= X):
                raise CatalogError(f"interval [{lo}, {hi}] is not inside [0, {X}]")
            keep = (self.x >= lo) & (self.x <= hi)
            xs = self.x[keep] - lo
            length = hi - lo
        else:
            if not self.domain.spatial_is_ring:
                raise CatalogError(f"wrapped interval [{lo}, {hi}] needs a ring domain")
            keep = (self.x >= lo) | (self.x <= hi)
            xs = np.where(self.x[keep] >= lo, self.x[keep] - lo, self.x[keep] + (X - lo))
            length = (X - lo) + hi
        dom = replace(self.domain, X=length, spatial_is_ring=False)
        return EventCatalog(dom, self.t[keep], xs)

    def to_csv(self, extra: Optional[Mapping[str, Sequence[object]]] = None) -> str:
        cols = list(HEADER) + list(extra or {})
        extras = [list(v) for v in (extra or {}).values()]
        rows = (
            [t, x, *(col[i] for col in extras)]
            for i, (t, x) in enumerate(zip(self.t.tolist(), self.x.tolist()))
        )
        return render_csv(cols, rows, comments=self.domain.header_lines())


def save_catalog(
    catalog: EventCatalog,
    path: Path,
    extra: Optional[Mapping[str, Sequence[object]]] = None,
) -> None:
    write_atomic(Path(path), catalog.to_csv(extra))


def load_catalog(path: Path, domain: Optional[StudyDomain] = None) -> EventCatalog:
    """
    Read an event CSV.

    Every rejected row is reported with its physical line number; nothing is
    returned unless all rows are valid.
    """
    p = Path(path)
    if not p.is_file():
        raise CatalogError(f"no such catalog file: {p}")

    comments: list[str] = []
    rows: list[tuple[int, list[str]]] = []
    header_seen = False
    problems: list[tuple[int, str]] = []

    with p.open(encoding="utf-8", newline="") as fp:
        for lineno, raw in enumerate(fp, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            if line.lstrip().startswith("#"):
                comments.append(line)
                continue
            cells = next(csv.reader([line]))
            if not header_seen:
                header_seen = True
                got = tuple(c.strip() for c in cells[:2])
                if got != HEADER:
                    raise CatalogError(
                        f"{p}: expected header {','.join(HEADER)!r}, got {line!r}"
                    )
                continue
            rows.append((lineno, cells))

    dom = domain_from_header(parse_header_comments(comments), domain)

    ts: list[float] = []
    xs: list[float] = []
    for lineno, cells in rows:
        if len(cells) < 2:
            problems.append((lineno, f"expected 2 columns, got {len(cells)}"))
            continue
        try:
            t = float(cells[0])
            x = float(cells[1])
        except ValueError:
            problems.append((lineno, f"not numeric: {','.join(cells[:2])!r}"))
            continue
        if not (math.isfinite(t) and math.isfinite(x)):
            problems.append((lineno, "non-finite coordinate"))
            continue
        if not dom.contains(t, x):
            problems.append(
                (lineno, f"({t!r}, {x!r}) outside [0,{dom.T!r}] x [0,{dom.X!r}]")
            )
            continue
        ts.append(t)
        xs.append(x)

    if problems:
        raise CatalogError(f"{p}: {len(problems)} bad row(s)", problems)
    if not ts:
        raise CatalogError("empty catalog")

    cat = EventCatalog(dom, np.array(ts), np.array(xs))
    log.info("loaded %d events from %s", len(cat), p)
    return cat


# ---------- configuration ----------

BANDWIDTH_FIELDS: dict[str, str] = {
    "daily": "omega_d",
    "weekly": "omega_w",
    "trend": "omega_t",
    "spatial": "omega_s",
    "g": "omega_g",
    "h": "omega_h",
}


_POSITIVE_FIELDS = (
    "omega_d",
    "omega_w",
    "omega_t",
    "omega_s",
    "omega_g",
    "omega_h",
    "trigger_horizon_t",
    "trigger_horizon_x",
    "tol",
    "dt",
    "dx",
)


@dataclass(frozen=True)
class FitConfig:
    omega_d: float = 60.0
    omega_w: float = 600.0
    omega_t: float = 20160.0
    omega_s: float = 5500.0
    omega_g: float = 30.0
    omega_h: float = 500.0
    trigger_horizon_t: float = 720.0
    trigger_horizon_x: float = 10000.0
    eps_mono: float = 0.0
    max_iters: int = 100
    tol: float = 1e-4
    dt: float = 1.0
    dx: float = 100.0
    monotone: bool = True
    max_cache_points: int = 4096

    def __post_init__(self) -> None:
        for name in _POSITIVE_FIELDS:
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be strictly positive, got {v!r}")
        if not (math.isfinite(self.eps_mono) and self.eps_mono >= 0):
            raise ConfigError(f"eps_mono must be >= 0, got {self.eps_mono!r}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters!r}")
        if self.max_cache_points < 2:
            raise ConfigError(
                f"max_cache_points must be >= 2, got {self.max_cache_points!r}"
            )

    def bandwidth(self, name: str) -> float:
        return float(getattr(self, BANDWIDTH_FIELDS[name]))

    def with_bandwidth(self, name: str, value: float) -> "FitConfig":
        if name not in BANDWIDTH_FIELDS:
            raise ConfigError(
                f"unknown bandwidth {name!r}; expected one of {', '.join(BANDWIDTH_FIELDS)}"
            )
        return replace(self, **{BANDWIDTH_FIELDS[name]: float(value)})

    def to_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.init}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "FitConfig":
        known = {f.name: f for f in fields(cls) if f.init}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ConfigError(f"unknown fit settings: {', '.join(unknown)}")
        kw: dict[str, Any] = {}
        for k, v in data.items():
            default = known[k].default
            try:
                if isinstance(default, bool):
                    kw[k] = v if isinstance(v, bool) else _truthy(str(v))
                elif isinstance(default, int):
                    kw[k] = int(v)
                else:
                    kw[k] = float(v)
            except (TypeError, ValueError):
                raise ConfigError(f"{k}: cannot read {v!r}") from None
        return cls(**kw)
