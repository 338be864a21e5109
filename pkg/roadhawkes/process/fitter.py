# roadhawkes/process/fitter.py
"""
The outer estimation loop.

Each iteration, in order:

    1. background weights and pair responsibilities from the current model
    2. re-estimate every enabled curve
    3. monotone adjustment of g and h
    4. the A / mu0 update from U and G

and stops once psi, A and mu0 all settle below `tol`, or after `max_iters`.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, NamedTuple, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from roadhawkes.debug import debug_dump
from roadhawkes.errors import (
    CatalogError,
    InconsistentStateError,
    MonotoneConvergenceError,
    MonotoneInfeasibleError,
    SubcriticalityError,
)
from roadhawkes.process.background import (
    compute_background_weights,
    estimate_periodic_component,
    estimate_spatial,
    estimate_trend,
)
from roadhawkes.process.catalog import EventCatalog, FitConfig
from roadhawkes.process.curves import ComponentCurve, TriggerCurve
from roadhawkes.process.model import (
    A_MAX,
    BACKGROUND,
    COMPONENTS,
    ModelComponents,
    normalize_enabled,
)
from roadhawkes.process.monotone import monotone_adjust
from roadhawkes.process.triggering import (
    PairSet,
    compute_rho,
    empty_pairs,
    estimate_g,
    estimate_h,
)

log = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

MIN_EVENTS = 10


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    A: float
    mu0: float
    log_likelihood: float
    max_dpsi: float
    partition_error: float


@dataclass
class FitReport:
    iterations: list[IterationRecord] = field(default_factory=list)
    converged: bool = False
    elapsed: float = 0.0
    monotone_failures: list[str] = field(default_factory=list)
    degenerate: list[str] = field(default_factory=list)

    @property
    def n_iterations(self) -> int:
        return len(self.iterations)

    @property
    def final(self) -> Optional[IterationRecord]:
        return self.iterations[-1] if self.iterations else None


class BranchingUpdate(NamedTuple):
    A: float
    mu0: float

    @property
    def saturated(self) -> bool:
        return self.A >= A_MAX


# ---------- U, G and the A / mu0 system ----------


def compute_U_G(model: ModelComponents, catalog: EventCatalog) -> tuple[float, float]:
    """
    U = (integral of mu_d mu_w mu_t over [0, T]) (integral of mu_s over [0, X])
    G = sum_i (mass of g inside the window) (mass of h inside the road)
    """
    U = model.temporal_total() * model.spatial_total()
    gg, hh = model.trigger_cumulatives(catalog)
    return U, float(np.sum(gg * hh))


def update_A_mu0(psi: ArrayLike | float, G: float, U: float, N: int) -> BranchingUpdate:
    """A = (N - sum psi) / G, mu0 = (N - A G) / U."""
    psi_sum = float(np.sum(psi))
    if not U > 0:
        raise InconsistentStateError(f"background integral U must be positive, got {U!r}")
    gap = N - psi_sum
    if G > 0:
        A = max(0.0, gap / G)
    elif gap <= 1e-9 * max(N, 1):
        A = 0.0
    else:
        raise InconsistentStateError(
            f"triggering integral G is 0 but sum(psi)={psi_sum!r} < N={N}"
        )
    mu0 = (N - A * G) / U
    return BranchingUpdate(A, mu0)


def log_likelihood(
    model: ModelComponents, catalog: EventCatalog, pairs: Optional[PairSet] = None
) -> float:
    """sum log lambda(t_i, x_i) - (mu0 U + A G); -inf when lambda vanishes at an event."""
    lam = model.event_intensities(catalog, pairs)
    if np.any(~(lam > 0)):
        return -math.inf
    U, G = compute_U_G(model, catalog)
    return float(np.sum(np.log(lam))) - (model.mu0 * U + model.A * G)


def homogeneous_log_likelihood(catalog: EventCatalog) -> float:
    """The Poisson MLE: N log(N / (T X)) - N."""
    n = len(catalog)
    rate = n / (catalog.domain.T * catalog.domain.X)
    return n * math.log(rate) - n


# ---------- the loop ----------


def _relative_change(new: float, old: float) -> float:
    if new == old:
        return 0.0
    return abs(new - old) / max(abs(old), 1e-12)


def _monotone(
    curve: TriggerCurve, eps: float, report: FitReport, iteration: int
) -> TriggerCurve:
    if curve.degenerate:
        return curve
    try:
        adjusted, sol = monotone_adjust(curve, eps)
    except (MonotoneInfeasibleError, MonotoneConvergenceError) as e:
        msg = f"iteration {iteration}: {curve.axis}: {e}"
        log.warning("monotone adjustment skipped, %s", msg)
        report.monotone_failures.append(msg)
        return curve
    log.debug("%s: monotone D0=%.6g", curve.axis, sol.d0)
    return adjusted


def _reestimate(
    model: ModelComponents,
    catalog: EventCatalog,
    weights_d: FloatArray,
    weights_w: FloatArray,
    weights_t: FloatArray,
    psi: FloatArray,
    pairs: PairSet,
    report: FitReport,
    iteration: int,
) -> ModelComponents:
    cfg = model.config
    dom = catalog.domain
    cap = cfg.max_cache_points
    curves: dict[str, ComponentCurve | TriggerCurve] = {}

    if model.is_enabled("daily"):
        curves["daily"] = estimate_periodic_component(
            catalog, weights_d, dom.m_d, cfg.omega_d, axis="daily", step=cfg.dt, max_points=cap
        )
    if model.is_enabled("weekly"):
        curves["weekly"] = estimate_periodic_component(
            catalog, weights_w, dom.m_w, cfg.omega_w, axis="weekly", step=cfg.dt, max_points=cap
        )
    if model.is_enabled("trend"):
        curves["trend"] = estimate_trend(
            catalog, weights_t, dom.T, cfg.omega_t, step=cfg.dt, max_points=cap
        )
    if model.is_enabled("spatial"):
        curves["spatial"] = estimate_spatial(
            catalog, psi, dom.X, cfg.omega_s, dom.spatial_is_ring, step=cfg.dx, max_points=cap
        )
    if model.is_enabled("triggering"):
        g = estimate_g(
            pairs, cfg.omega_g, dom.T, catalog.t,
            horizon=cfg.trigger_horizon_t, step=cfg.dt, max_points=cap,
        )
        h = estimate_h(
            pairs, cfg.omega_h, catalog.x,
            horizon=cfg.trigger_horizon_x, step=cfg.dx, max_points=cap,
        )
        if cfg.monotone:
            g = _monotone(g, cfg.eps_mono, report, iteration)
            h = _monotone(h, cfg.eps_mono, report, iteration)
        curves["g"], curves["h"] = g, h

    for name, c in curves.items():
        if c.degenerate and name not in report.degenerate:
            report.degenerate.append(name)
    return replace(model, **curves)  # type: ignore[arg-type]


def fit(
    catalog: EventCatalog,
    config: Optional[FitConfig] = None,
    enabled: Optional[Mapping[str, bool] | Iterable[str]] = None,
    *,
    initial_A: float = 0.05,
) -> tuple[ModelComponents, FitReport]:
    cfg = config or FitConfig()
    on = normalize_enabled(enabled)
    n = len(catalog)
    if n < MIN_EVENTS:
        raise CatalogError(f"refusing to fit {n} events; at least {MIN_EVENTS} are needed")

    dom = catalog.domain
    started = time.perf_counter()
    report = FitReport()

    triggering = "triggering" in on
    model = ModelComponents.initial(dom, cfg, n / (dom.T * dom.X), initial_A, on)
    pairs = model.pairs_for(catalog) if triggering else empty_pairs(n)
    log.info(
        "fitting %d events, %d candidate pairs, components: %s",
        n, len(pairs), ", ".join(sorted(on)),
    )

    prev_psi: Optional[FloatArray] = None
    for it in range(1, cfg.max_iters + 1):
        bw = compute_background_weights(catalog, model, pairs)
        if triggering:
            pairs = compute_rho(pairs, model, catalog)
        psi = bw.psi
        partition = float(np.max(np.abs(psi + pairs.rho_sums() - 1.0)))

        model = _reestimate(model, catalog, bw.w_d, bw.w_w, bw.w_t, psi, pairs, report, it)

        U, G = compute_U_G(model, catalog)
        upd = update_A_mu0(psi, G, U, n)
        if upd.saturated:
            raise SubcriticalityError(
                f"branching ratio reached {upd.A:.4f} at iteration {it}; the model is explosive"
            )
        A = upd.A if triggering else 0.0
        old_A, old_mu0 = model.A, model.mu0
        model = replace(model, A=A, mu0=upd.mu0)

        ll = log_likelihood(model, catalog, pairs)
        max_dpsi = math.inf if prev_psi is None else float(np.max(np.abs(psi - prev_psi)))
        rec = IterationRecord(it, A, upd.mu0, ll, max_dpsi, partition)
        report.iterations.append(rec)
        log.info(
            "iteration %d: A=%.6f mu0=%.6g loglik=%.4f max|dpsi|=%.3g",
            it, A, upd.mu0, ll, max_dpsi,
        )
        debug_dump(f"fit iteration {it}", [rec])

        if (
            max_dpsi < cfg.tol
            and _relative_change(A, old_A) < cfg.tol
            and _relative_change(upd.mu0, old_mu0) < cfg.tol
        ):
            report.converged = True
            break
        prev_psi = psi

    report.elapsed = time.perf_counter() - started
    if not report.converged:
        log.warning("fit did not converge in %d iterations", cfg.max_iters)
    return model, report


def responsibilities(
    model: ModelComponents, catalog: EventCatalog
) -> tuple[FloatArray, PairSet]:
    """psi and the pair set with rho filled in, for a given model."""
    pairs = model.pairs_for(catalog) if model.A > 0 else empty_pairs(len(catalog))
    bw = compute_background_weights(catalog, model, pairs)
    if model.A > 0:
        pairs = compute_rho(pairs, model, catalog)
    return bw.psi, pairs


# ---------- hotspots ----------


def extract_hotspots(curve: ComponentCurve) -> list[tuple[float, float]]:
    """
    Maximal intervals where the curve exceeds 1, with crossing points found
    by linear interpolation. On a ring an interval may wrap the seam; it is
    then reported with start > end.
    """
    grid, vals = curve.grid, curve.values - 1.0
    if curve.periodic:
        grid, vals = grid[:-1], vals[:-1]
    above = vals > 0
    if not np.any(above):
        return []
    if np.all(above):
        return [(curve.lo, curve.hi)]

    n = above.size

    def crossing(k0: int, k1: int, x0: float, x1: float) -> float:
        v0, v1 = vals[k0], vals[k1]
        return x0 + (x1 - x0) * (v0 / (v0 - v1))

    runs: list[tuple[int, int]] = []
    k = 0
    while k < n:
        if above[k]:
            start = k
            while k + 1 < n and above[k + 1]:
                k += 1
            runs.append((start, k))
        k += 1

    step = curve.step
    out: list[tuple[float, float]] = []
    for a, b in runs:
        if a == 0:
            if curve.periodic:
                lo = crossing(n - 1, 0, float(grid[0]) - step, float(grid[0]))
            else:
                lo = float(grid[0])
        else:
            lo = crossing(a - 1, a, float(grid[a - 1]), float(grid[a]))
        if b == n - 1:
            if curve.periodic:
                hi = crossing(n - 1, 0, float(grid[n - 1]), float(grid[n - 1]) + step)
            else:
                hi = float(grid[-1])
        else:
            hi = crossing(b, b + 1, float(grid[b]), float(grid[b + 1]))
        out.append((lo, hi))

    if curve.periodic:
        out = [(lo % curve.length, hi % curve.length) for lo, hi in out]
        if len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == n - 1:
            first = out.pop(0)
            last = out.pop()
            out.append((last[0], first[1]))
    return out


def hotspot_counts(
    catalog: EventCatalog, hotspots: list[tuple[float, float]]
) -> list[int]:
    counts = []
    for lo, hi in hotspots:
        if lo <= hi:
            counts.append(int(np.count_nonzero((catalog.x >= lo) & (catalog.x <= hi))))
        else:
            counts.append(int(np.count_nonzero((catalog.x >= lo) | (catalog.x <= hi))))
    return counts


# ---------- nested models ----------

_LABELS = {"daily": "Daily", "weekly": "Weekly", "trend": "Trend", "spatial": "Spatial"}

NESTED_MODELS: tuple[frozenset[str], ...] = (
    frozenset(),
    frozenset({"daily", "weekly"}),
    frozenset({"daily", "weekly", "trend"}),
    frozenset({"daily", "weekly", "triggering"}),
    frozenset({"daily", "weekly", "trend", "triggering"}),
    frozenset(COMPONENTS),
)


def model_label(enabled: Iterable[str]) -> str:
    """Table name for a set of enabled components, e.g. 'Daily + Weekly Background'."""
    on = normalize_enabled(enabled)
    if not on:
        return "Fixed Rate Poisson Process"
    parts = [_LABELS[name] for name in BACKGROUND if name in on]
    if "triggering" in on:
        return " + ".join(parts + ["Triggering"])
    return " + ".join(parts) + " Background"
