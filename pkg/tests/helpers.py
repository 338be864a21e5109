from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Callable, Iterable, Optional

import numpy as np
from scipy.integrate import trapezoid

from roadhawkes.process.catalog import EventCatalog, FitConfig, StudyDomain
from roadhawkes.process.model import ModelComponents
from roadhawkes.process.scenarios import benchmark_domain, benchmark_model, exponential_trigger
from roadhawkes.process.simulator import SimSpec, simulate


# ---------- files ----------
def write_lines(path: Path, lines: Iterable[str]) -> Path:
    path.write_text("".join(f"{ln}\n" for ln in lines), encoding="utf-8")
    return path


def write_events(
    path: Path, rows: Iterable[tuple[float, float]], *, T: float = 100.0, X: float = 1000.0
) -> Path:
    body = [f"#T={T!r}", f"#X={X!r}", "t_min,x_m"] + [f"{t!r},{x!r}" for t, x in rows]
    return write_lines(path, body)


# ---------- oracles ----------
def quad(fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, step: float) -> float:
    """Trapezoid rule on a uniform grid no coarser than `step`."""
    n = int(np.ceil((hi - lo) / step)) + 1
    y = np.linspace(lo, hi, n)
    return float(trapezoid(fn(y), y))


def central_mare(
    estimate: Callable[[np.ndarray], np.ndarray],
    truth: Callable[[np.ndarray], np.ndarray],
    grid: np.ndarray,
    share: float = 0.8,
) -> float:
    """Mean absolute relative error over the central `share` of a grid."""
    lo, hi = float(grid[0]), float(grid[-1])
    margin = 0.5 * (1.0 - share) * (hi - lo)
    y = grid[(grid >= lo + margin) & (grid <= hi - margin)]
    want = np.asarray(truth(y), dtype=np.float64)
    return float(np.mean(np.abs(np.asarray(estimate(y)) / want - 1.0)))


# ---------- models and catalogs ----------
def catalog(rows: Iterable[tuple[float, float]], T: float = 100.0, X: float = 1000.0) -> EventCatalog:
    pts = list(rows)
    return EventCatalog(
        StudyDomain(T=T, X=X),
        np.array([p[0] for p in pts], dtype=np.float64),
        np.array([p[1] for p in pts], dtype=np.float64),
    )


def flat_model(
    domain: StudyDomain,
    mu0: float,
    A: float = 0.0,
    config: Optional[FitConfig] = None,
    *,
    g_mean: float = 100.0,
    h_mean: float = 800.0,
) -> ModelComponents:
    """Flat background; exponential g and h when A > 0."""
    cfg = config or FitConfig()
    enabled = ("daily", "weekly", "trend", "spatial") + (("triggering",) if A > 0 else ())
    base = ModelComponents.initial(domain, cfg, mu0, A, enabled)
    if A == 0:
        return base
    g = exponential_trigger("g", g_mean, cfg.trigger_horizon_t, cfg.dt, cfg.max_cache_points)
    h = exponential_trigger("h", h_mean, cfg.trigger_horizon_x, cfg.dx, cfg.max_cache_points)
    return replace(base, g=g, h=h)


def benchmark_catalog(seed: int, days: int = 90, events: float = 1500.0) -> EventCatalog:
    dom = benchmark_domain(days)
    model = benchmark_model(dom, expected_events=events)
    return simulate(SimSpec(model, seed)).catalog


def uniform_catalog(rng: np.random.Generator, n: int, T: float, X: float) -> EventCatalog:
    return EventCatalog(StudyDomain(T=T, X=X), rng.uniform(0, T, n), rng.uniform(0, X, n))
