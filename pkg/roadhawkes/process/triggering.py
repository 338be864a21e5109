# roadhawkes/process/triggering.py
"""
Parent/child pairs and the triggering estimators.

An event i can trigger a later event j only from downstream: t_i < t_j and
x_i > x_j. Lags are stored as nonnegative numbers, dt = t_j - t_i and the
upstream distance dx = x_i - x_j, and g, h are densities on those lags.
Distances are linear even on a ring road.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import ndtr

from roadhawkes.errors import DegenerateModelError, KernelError
from roadhawkes.process.catalog import EventCatalog
from roadhawkes.process.curves import TriggerCurve, grid_points

if TYPE_CHECKING:
    from roadhawkes.process.model import ModelComponents

log = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]


def earlier_within(t: FloatArray, horizon: float) -> tuple[IntArray, IntArray]:
    """
    All index pairs (i, j) with t_j - horizon <= t_i < t_j on a sorted time
    array, j-major then i.
    """
    n = t.size
    lo = np.searchsorted(t, t - horizon, side="left")
    hi = np.searchsorted(t, t, side="left")
    counts = (hi - lo).astype(np.int64)
    total = int(counts.sum())
    j = np.repeat(np.arange(n, dtype=np.int64), counts)
    offsets = np.repeat(np.cumsum(counts) - counts, counts)
    i = lo[j].astype(np.int64) + (np.arange(total, dtype=np.int64) - offsets)
    return i, j


@dataclass(frozen=True, eq=False)
class PairSet:
    n_events: int
    i: IntArray
    j: IntArray
    dt: FloatArray
    dx: FloatArray
    rho: FloatArray

    def __len__(self) -> int:
        return int(self.i.size)

    def with_rho(self, rho: ArrayLike) -> "PairSet":
        r = np.asarray(rho, dtype=np.float64)
        if r.shape != self.i.shape:
            raise KernelError(f"{r.size} responsibilities for {len(self)} pairs")
        return replace(self, rho=r)

    def rho_sums(self) -> FloatArray:
        """sum_i rho_ij for every receiving event j."""
        out: FloatArray = np.bincount(self.j, weights=self.rho, minlength=self.n_events)
        return out

    def for_receiver(self, j: int) -> "PairSet":
        m = self.j == j
        return PairSet(self.n_events, self.i[m], self.j[m], self.dt[m], self.dx[m], self.rho[m])


def empty_pairs(n_events: int) -> PairSet:
    z = np.zeros(0, dtype=np.int64)
    f = np.zeros(0, dtype=np.float64)
    return PairSet(n_events, z, z, f, f, f)


def enumerate_pairs(
    catalog: EventCatalog, horizon_t: float, horizon_x: float
) -> PairSet:
    """Every admissible (parent, child) pair, j-major then i."""
    i, j = earlier_within(catalog.t, horizon_t)
    dt = catalog.t[j] - catalog.t[i]
    dx = catalog.x[i] - catalog.x[j]
    keep = (dt > 0) & (dt <= horizon_t) & (dx > 0) & (dx <= horizon_x)
    i, j, dt, dx = i[keep], j[keep], dt[keep], dx[keep]
    log.debug("%d admissible pairs among %d events", i.size, len(catalog))
    return PairSet(len(catalog), i, j, dt, dx, np.zeros(i.size, dtype=np.float64))


def compute_rho(
    pairs: PairSet, model: "ModelComponents", catalog: EventCatalog
) -> PairSet:
    """rho_ij = A g(dt) h(dx) / lambda(t_j, x_j)."""
    if len(pairs) == 0:
        return pairs
    lam = model.event_intensities(catalog, pairs)
    recv = lam[pairs.j]
    if np.any(~(recv > 0)):
        bad = int(pairs.j[np.flatnonzero(~(recv > 0))[0]])
        raise DegenerateModelError(f"intensity is {lam[bad]!r} at receiving event {bad}")
    num = model.A * model.g(pairs.dt) * model.h(pairs.dx)
    return pairs.with_rho(num / recv)


def _no_evidence(axis: str, horizon: float, points: int) -> TriggerCurve:
    log.warning("%s: no triggering evidence, using a flat density", axis)
    return TriggerCurve.flat(axis, 0.0, horizon, points, 1.0 / horizon, degenerate=True)


def _trigger_curve(
    axis: str,
    lags: FloatArray,
    weights: FloatArray,
    omega: float,
    horizon: float,
    cutoffs: FloatArray,
    support_lengths: FloatArray,
    step: float,
    max_points: int,
) -> TriggerCurve:
    if not (math.isfinite(omega) and omega > 0):
        raise KernelError(f"{axis}: bandwidth must be positive, got {omega!r}")
    points = grid_points(0.0, horizon, step, max_points)
    if lags.size == 0 or not np.any(weights > 0):
        return _no_evidence(axis, horizon, points)
    masses = mirrored_masses(lags, omega, cutoffs)
    return TriggerCurve.build(
        "integral",
        axis=axis,
        kind="trigger",
        lo=0.0,
        hi=horizon,
        points=points,
        bandwidth=omega,
        centers=lags,
        weights=weights,
        masses=masses,
        cutoffs=cutoffs,
        support_lengths=support_lengths,
    )


def mirrored_masses(lags: ArrayLike, omega: float, cutoffs: ArrayLike) -> FloatArray:
    """Mass on [0, cutoff] of k(y - lag) + k(y + lag), per point."""
    c = np.asarray(lags, dtype=np.float64)
    L = np.asarray(cutoffs, dtype=np.float64)
    out: FloatArray = (ndtr((L - c) / omega) - ndtr(-c / omega)) + (
        ndtr((L + c) / omega) - ndtr(c / omega)
    )
    return out


def estimate_g(
    pairs: PairSet,
    omega_g: float,
    T: float,
    event_times: ArrayLike,
    *,
    horizon: float = 720.0,
    step: float = 1.0,
    max_points: int = 4096,
) -> TriggerCurve:
    """
    Temporal triggering density on [0, horizon].

    Each pair's mirrored kernel is normalized over the time its parent had
    left, [0, min(horizon, T - t_i)]; the sum is divided by the number of
    events with at least that much time left and scaled to unit integral.
    """
    t = np.asarray(event_times, dtype=np.float64)
    cutoffs = np.minimum(horizon, T - t[pairs.i])
    return _trigger_curve(
        "g", pairs.dt, pairs.rho, omega_g, horizon, cutoffs, T - t, step, max_points
    )


def estimate_h(
    pairs: PairSet,
    omega_h: float,
    positions: ArrayLike,
    *,
    horizon: float = 10000.0,
    step: float = 100.0,
    max_points: int = 4096,
) -> TriggerCurve:
    """Spatial triggering density on upstream distance [0, horizon]."""
    x = np.asarray(positions, dtype=np.float64)
    cutoffs = np.minimum(horizon, x[pairs.i])
    return _trigger_curve(
        "h", pairs.dx, pairs.rho, omega_h, horizon, cutoffs, x, step, max_points
    )


def flat_trigger(axis: str, horizon: float, step: float, max_points: int) -> TriggerCurve:
    """Uniform density on [0, horizon]; the starting guess and the disabled form."""
    points = grid_points(0.0, horizon, step, max_points)
    return TriggerCurve.flat(axis, 0.0, horizon, points, 1.0 / horizon)

