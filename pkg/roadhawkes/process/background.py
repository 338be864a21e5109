# roadhawkes/process/background.py
"""
Background weights and the four background estimators.

Each estimator is a weighted sum of per-point normalized Gaussian kernels,
scaled so the curve averages 1 over its domain; mu0 alone carries units.
Daily and weekly curves live on the periodic clock set by the domain's
origin, the trend on [0, T] mirrored at both ends, the spatial curve on
[0, X] (periodic when the road is a ring).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from roadhawkes.errors import DegenerateModelError, KernelError
from roadhawkes.process.catalog import EventCatalog
from roadhawkes.process.curves import (
    ComponentCurve,
    grid_points,
    periodic_masses_for,
    truncated_masses_for,
)

if TYPE_CHECKING:
    from roadhawkes.process.model import ModelComponents
    from roadhawkes.process.triggering import PairSet

log = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class BackgroundWeights:
    """
    Per-event weights driving the background estimators.

    w_d, w_w and w_t are rescaled by their own maximum whenever it exceeds
    1; estimators only see relative weights, so the curves do not change.
    """

    w_d: FloatArray
    w_w: FloatArray
    w_t: FloatArray
    psi: FloatArray


def _unit_bounded(w: FloatArray) -> FloatArray:
    top = float(w.max()) if w.size else 0.0
    out: FloatArray = w / top if top > 1.0 else w
    return out


def compute_background_weights(
    catalog: EventCatalog,
    model: "ModelComponents",
    pairs: Optional["PairSet"] = None,
) -> BackgroundWeights:
    """
    psi_i = mu0 mu_d mu_w mu_t mu_s / lambda at each event, and the three
    component weights mu0 mu_c mu_s / lambda for c in daily, weekly, trend.
    """
    mu_d, mu_w, mu_t, mu_s = model.background_factors(catalog.t, catalog.x)
    bg = model.background(catalog.t, catalog.x)
    lam = model.event_intensities(catalog, pairs)
    if np.any(~(lam > 0)):
        bad = int(np.flatnonzero(~(lam > 0))[0])
        raise DegenerateModelError(
            f"intensity is {lam[bad]!r} at event {bad} "
            f"(t={catalog.t[bad]!r}, x={catalog.x[bad]!r})"
        )
    base = model.mu0 * mu_s / lam
    psi = np.minimum(bg / lam, 1.0)
    return BackgroundWeights(
        w_d=_unit_bounded(base * mu_d),
        w_w=_unit_bounded(base * mu_w),
        w_t=_unit_bounded(base * mu_t),
        psi=psi,
    )


def _degenerate(axis: str, lo: float, hi: float, points: int, periodic: bool) -> ComponentCurve:
    log.warning("%s: all weights are zero, using a flat curve", axis)
    return ComponentCurve.flat(axis, lo, hi, points, 1.0, periodic=periodic, degenerate=True)


def _check_weights(catalog: EventCatalog, weights: ArrayLike) -> FloatArray:
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    if w.size != len(catalog):
        raise KernelError(f"{w.size} weights for {len(catalog)} events")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise KernelError("weights must be finite and nonnegative")
    return w


def estimate_periodic_component(
    catalog: EventCatalog,
    weights: ArrayLike,
    period: float,
    omega: float,
    *,
    axis: str = "daily",
    step: float = 1.0,
    max_points: int = 4096,
) -> ComponentCurve:
    """Weighted periodic kernel estimate of a daily or weekly modulation."""
    w = _check_weights(catalog, weights)
    points = grid_points(0.0, period, step, max_points)
    if not np.any(w > 0):
        return _degenerate(axis, 0.0, period, points, True)
    centers = np.mod(catalog.domain.origin + catalog.t, period)
    return ComponentCurve.build(
        "mean",
        axis=axis,
        kind="periodic",
        lo=0.0,
        hi=period,
        points=points,
        periodic=True,
        bandwidth=omega,
        centers=centers,
        weights=w,
        masses=periodic_masses_for(centers, omega, 0.0, period),
    )


def estimate_trend(
    catalog: EventCatalog,
    weights: ArrayLike,
    T: float,
    omega_t: float,
    *,
    step: float = 1.0,
    max_points: int = 4096,
) -> ComponentCurve:
    w = _check_weights(catalog, weights)
    points = grid_points(0.0, T, step, max_points)
    if not np.any(w > 0):
        return _degenerate("trend", 0.0, T, points, False)
    centers = np.asarray(catalog.t, dtype=np.float64)
    return ComponentCurve.build(
        "mean",
        axis="trend",
        kind="truncated",
        lo=0.0,
        hi=T,
        points=points,
        bandwidth=omega_t,
        centers=centers,
        weights=w,
        masses=truncated_masses_for(centers, omega_t, 0.0, T),
    )


def estimate_spatial(
    catalog: EventCatalog,
    psi: ArrayLike,
    X: float,
    omega_s: float,
    ring: bool,
    *,
    step: float = 100.0,
    max_points: int = 4096,
) -> ComponentCurve:
    w = _check_weights(catalog, psi)
    points = grid_points(0.0, X, step, max_points)
    if not np.any(w > 0):
        return _degenerate("spatial", 0.0, X, points, ring)
    centers = np.asarray(catalog.x, dtype=np.float64)
    if ring:
        return ComponentCurve.build(
            "mean",
            axis="spatial",
            kind="periodic",
            lo=0.0,
            hi=X,
            points=points,
            periodic=True,
            bandwidth=omega_s,
            centers=centers,
            weights=w,
            masses=periodic_masses_for(centers, omega_s, 0.0, X),
        )
    return ComponentCurve.build(
        "mean",
        axis="spatial",
        kind="truncated",
        lo=0.0,
        hi=X,
        points=points,
        bandwidth=omega_s,
        centers=centers,
        weights=w,
        masses=truncated_masses_for(centers, omega_s, 0.0, X),
    )
