# roadhawkes/process/model.py
"""
The fitted (or hand-specified) model and its conditional intensity

    lambda(t, x) = mu0 mu_d(t) mu_w(t) mu_t(t) mu_s(x)
                   + A sum_{t_i < t, x_i > x} g(t - t_i) h(x_i - x)

Disabled background components hold the constant curve 1; disabled
triggering holds A = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import cumulative_trapezoid

from roadhawkes.errors import InconsistentStateError
from roadhawkes.process.catalog import EventCatalog, FitConfig, StudyDomain
from roadhawkes.process.curves import ComponentCurve, TriggerCurve, grid_points
from roadhawkes.process.triggering import PairSet, enumerate_pairs, flat_trigger

FloatArray = NDArray[np.float64]

BACKGROUND = ("daily", "weekly", "trend", "spatial")
COMPONENTS = BACKGROUND + ("triggering",)

A_MAX = 0.99


def normalize_enabled(enabled: Optional[Mapping[str, bool] | Iterable[str]]) -> frozenset[str]:
    """Accept a flag mapping or a collection of enabled names."""
    if enabled is None:
        return frozenset(COMPONENTS)
    names = (
        {k for k, v in enabled.items() if v} if isinstance(enabled, Mapping) else set(enabled)
    )
    unknown = names - set(COMPONENTS)
    if unknown:
        raise InconsistentStateError(f"unknown components: {', '.join(sorted(unknown))}")
    return frozenset(names)


def flat_component(axis: str, domain: StudyDomain, config: FitConfig) -> ComponentCurve:
    if axis == "daily":
        lo, hi, step, periodic = 0.0, domain.m_d, config.dt, True
    elif axis == "weekly":
        lo, hi, step, periodic = 0.0, domain.m_w, config.dt, True
    elif axis == "trend":
        lo, hi, step, periodic = 0.0, domain.T, config.dt, False
    elif axis == "spatial":
        lo, hi, step, periodic = 0.0, domain.X, config.dx, domain.spatial_is_ring
    else:
        raise InconsistentStateError(f"unknown background axis {axis!r}")
    points = grid_points(lo, hi, step, config.max_cache_points)
    return ComponentCurve.flat(axis, lo, hi, points, 1.0, periodic=periodic)


@dataclass(frozen=True, eq=False)
class ModelComponents:
    domain: StudyDomain
    config: FitConfig
    mu0: float
    A: float
    daily: ComponentCurve
    weekly: ComponentCurve
    trend: ComponentCurve
    spatial: ComponentCurve
    g: TriggerCurve
    h: TriggerCurve
    enabled: frozenset[str] = field(default_factory=lambda: frozenset(COMPONENTS))

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu0) and self.mu0 >= 0):
            raise InconsistentStateError(f"mu0 must be >= 0, got {self.mu0!r}")
        if not (0.0 <= self.A < 1.0):
            raise InconsistentStateError(f"A must lie in [0, 1), got {self.A!r}")
        object.__setattr__(self, "enabled", normalize_enabled(self.enabled))

    @classmethod
    def initial(
        cls,
        domain: StudyDomain,
        config: FitConfig,
        mu0: float,
        A: float = 0.05,
        enabled: Optional[Mapping[str, bool] | Iterable[str]] = None,
    ) -> "ModelComponents":
        """Flat curves everywhere; uniform g and h on their horizons."""
        on = normalize_enabled(enabled)
        return cls(
            domain=domain,
            config=config,
            mu0=mu0,
            A=A if "triggering" in on else 0.0,
            daily=flat_component("daily", domain, config),
            weekly=flat_component("weekly", domain, config),
            trend=flat_component("trend", domain, config),
            spatial=flat_component("spatial", domain, config),
            g=flat_trigger("g", config.trigger_horizon_t, config.dt, config.max_cache_points),
            h=flat_trigger("h", config.trigger_horizon_x, config.dx, config.max_cache_points),
            enabled=on,
        )

    def is_enabled(self, name: str) -> bool:
        return name in self.enabled

    # ---------- background ----------

    def background_factors(
        self, t: ArrayLike, x: ArrayLike
    ) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
        ta = np.asarray(t, dtype=np.float64)
        xa = np.asarray(x, dtype=np.float64)
        return (
            self.daily(self.domain.daily_phase(ta)),
            self.weekly(self.domain.weekly_phase(ta)),
            self.trend(ta),
            self.spatial(xa),
        )

    def temporal(self, t: ArrayLike) -> FloatArray:
        """mu_d(t) mu_w(t) mu_t(t)."""
        d, w, tr, _ = self.background_factors(t, np.zeros(np.shape(t)))
        out: FloatArray = d * w * tr
        return out

    def background(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        d, w, tr, s = self.background_factors(t, x)
        out: FloatArray = self.mu0 * (d * w * tr) * s
        return out

    @cached_property
    def _temporal_grid(self) -> tuple[FloatArray, FloatArray, FloatArray]:
        points = grid_points(0.0, self.domain.T, self.config.dt, 1 << 62)
        grid = np.linspace(0.0, self.domain.T, points)
        vals = self.temporal(grid)
        cum = cumulative_trapezoid(vals, grid, initial=0.0)
        return grid, vals, cum

    def temporal_cumulative(self, t: ArrayLike) -> FloatArray:
        """Integral over [0, t] of mu_d mu_w mu_t, exact for the interpolant on the Δt grid."""
        grid, vals, cum = self._temporal_grid
        tc = np.clip(np.asarray(t, dtype=np.float64), 0.0, self.domain.T)
        k = np.clip(np.searchsorted(grid, tc, side="right") - 1, 0, grid.size - 2)
        f = np.interp(tc, grid, vals)
        out: FloatArray = cum[k] + (tc - grid[k]) * (vals[k] + f) / 2.0
        return out

    def temporal_total(self) -> float:
        return float(self._temporal_grid[2][-1])

    def spatial_total(self) -> float:
        return self.spatial.total()

    # ---------- triggering ----------

    def pairs_for(self, catalog: EventCatalog) -> PairSet:
        return enumerate_pairs(
            catalog, self.config.trigger_horizon_t, self.config.trigger_horizon_x
        )

    def excitation(self, catalog: EventCatalog, pairs: Optional[PairSet] = None) -> FloatArray:
        """sum_i g(dt) h(dx) over the admissible parents of each event."""
        if self.A == 0.0:
            return np.zeros(len(catalog), dtype=np.float64)
        pr = self.pairs_for(catalog) if pairs is None else pairs
        out: FloatArray = np.bincount(
            pr.j, weights=self.g(pr.dt) * self.h(pr.dx), minlength=len(catalog)
        )
        return out

    def event_intensities(
        self, catalog: EventCatalog, pairs: Optional[PairSet] = None
    ) -> FloatArray:
        bg = self.background(catalog.t, catalog.x)
        out: FloatArray = bg + self.A * self.excitation(catalog, pairs)
        return out

    def intensity(self, t: float, x: float, history: EventCatalog) -> float:
        """lambda(t, x) given the events of `history` strictly before t."""
        lam = float(self.background([t], [x])[0])
        if self.A == 0.0 or len(history) == 0:
            return lam
        dt = t - history.t
        dx = history.x - x
        ok = (
            (dt > 0)
            & (dt <= self.config.trigger_horizon_t)
            & (dx > 0)
            & (dx <= self.config.trigger_horizon_x)
        )
        if np.any(ok):
            lam += self.A * float(np.sum(self.g(dt[ok]) * self.h(dx[ok])))
        return lam

    def trigger_cumulatives(self, catalog: EventCatalog) -> tuple[FloatArray, FloatArray]:
        """
        For each event, the mass of g inside the window and of h inside the
        road: G_g(min(H_t, T - t_i)) and H_h(min(H_x, x_i)).
        """
        gg = self.g.cumulative(np.minimum(self.g.hi, self.domain.T - catalog.t))
        hh = self.h.cumulative(np.minimum(self.h.hi, catalog.x))
        return gg, hh

    def triggered_mass(self, lag: float = 100.0) -> float:
        """A times the mass of g on [0, lag]."""
        return self.A * float(self.g.cumulative(min(lag, self.g.hi)))

    def reanchored(self, domain: StudyDomain) -> "ModelComponents":
        """The same curves evaluated over another window of the same road."""
        return replace(self, domain=domain)
