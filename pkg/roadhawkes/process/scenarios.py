# roadhawkes/process/scenarios.py
"""
Hand-specified models with known components, for simulation studies and
recovery checks.

The benchmark road is 90 days by 180 km: a morning and an evening peak,
no weekly or long-term variation, two spatial clusters and an exponential
triggering kernel in time and distance.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

import numpy as np

from roadhawkes.process.catalog import MINUTES_PER_DAY, FitConfig, StudyDomain
from roadhawkes.process.curves import ComponentCurve, TriggerCurve, grid_points
from roadhawkes.process.model import ModelComponents, flat_component

BENCHMARK_DAYS = 90
BENCHMARK_LENGTH_M = 180_000.0
BENCHMARK_A = 0.10
BENCHMARK_EVENTS = 1500

MORNING_PEAK = 480.0
EVENING_PEAK = 1050.0
SPATIAL_BUMPS = (25_000.0, 140_000.0)
G_MEAN = 100.0
H_MEAN = 800.0


def _bump(x: np.ndarray, center: float, width: float) -> np.ndarray:
    out: np.ndarray = np.exp(-0.5 * ((x - center) / width) ** 2)
    return out


def two_peak_daily(m: np.ndarray) -> np.ndarray:
    return 1.0 + 1.5 * _bump(m, MORNING_PEAK, 60.0) + 1.2 * _bump(m, EVENING_PEAK, 75.0)


def two_bump_spatial(x: np.ndarray) -> np.ndarray:
    return (
        0.4
        + _bump(x, SPATIAL_BUMPS[0], 5_000.0)
        + 0.8 * _bump(x, SPATIAL_BUMPS[1], 6_000.0)
    )


def exponential_trigger(
    axis: str, mean: float, horizon: float, step: float, max_points: int
) -> TriggerCurve:
    """exp(-y / mean) on [0, horizon], scaled to unit integral."""
    points = grid_points(0.0, horizon, step, max_points)
    return TriggerCurve.from_function(
        axis, lambda y: np.exp(-y / mean), 0.0, horizon, points, normalize="integral"
    )


def benchmark_domain(days: int = BENCHMARK_DAYS, length_m: float = BENCHMARK_LENGTH_M) -> StudyDomain:
    return StudyDomain(T=days * MINUTES_PER_DAY, X=length_m)


def benchmark_model(
    domain: Optional[StudyDomain] = None,
    config: Optional[FitConfig] = None,
    *,
    A: float = BENCHMARK_A,
    expected_events: float = BENCHMARK_EVENTS,
) -> ModelComponents:
    """
    The planted model. mu0 is set so the expected catalog size is close to
    `expected_events`, ignoring the few offspring lost off the edges.
    """
    dom = domain or benchmark_domain()
    cfg = config or FitConfig()
    cap = cfg.max_cache_points

    daily = ComponentCurve.from_function(
        "daily", two_peak_daily, 0.0, dom.m_d,
        grid_points(0.0, dom.m_d, cfg.dt, cap), periodic=True, normalize="mean",
    )
    spatial = ComponentCurve.from_function(
        "spatial", two_bump_spatial, 0.0, dom.X,
        grid_points(0.0, dom.X, cfg.dx, cap), periodic=dom.spatial_is_ring, normalize="mean",
    )
    g = exponential_trigger("g", G_MEAN, cfg.trigger_horizon_t, cfg.dt, cap)
    h = exponential_trigger("h", H_MEAN, cfg.trigger_horizon_x, cfg.dx, cap)

    mu0 = expected_events * (1.0 - A) / (dom.T * dom.X)
    return ModelComponents(
        domain=dom,
        config=cfg,
        mu0=mu0,
        A=A,
        daily=daily,
        weekly=flat_component("weekly", dom, cfg),
        trend=flat_component("trend", dom, cfg),
        spatial=spatial,
        g=g,
        h=h,
    )


def seasonal_model(
    domain: StudyDomain,
    expected_events: float,
    config: Optional[FitConfig] = None,
    *,
    amplitude: float = 4.0,
) -> ModelComponents:
    """A single strong daily peak and nothing else; no triggering."""
    cfg = config or FitConfig()
    cap = cfg.max_cache_points
    daily = ComponentCurve.from_function(
        "daily",
        lambda m: 1.0 + amplitude * _bump(m, MORNING_PEAK, 45.0),
        0.0, domain.m_d, grid_points(0.0, domain.m_d, cfg.dt, cap),
        periodic=True, normalize="mean",
    )
    base = ModelComponents.initial(
        domain, cfg, expected_events / (domain.T * domain.X), 0.0,
        enabled=("daily", "weekly", "trend", "spatial"),
    )
    return replace(base, daily=daily)


def homogeneous_model(
    domain: StudyDomain, rate: float, config: Optional[FitConfig] = None
) -> ModelComponents:
    """Constant intensity `rate` per minute per metre."""
    cfg = config or FitConfig()
    return ModelComponents.initial(domain, cfg, rate, 0.0, enabled=())

