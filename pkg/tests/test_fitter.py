# tests/test_fitter.py
import statistics

import numpy as np
import pytest

from roadhawkes.errors import CatalogError, InconsistentStateError
from roadhawkes.process.catalog import EventCatalog, FitConfig, StudyDomain
from roadhawkes.process.curves import ComponentCurve
from roadhawkes.process.fitter import (
    NESTED_MODELS,
    compute_U_G,
    extract_hotspots,
    fit,
    homogeneous_log_likelihood,
    hotspot_counts,
    log_likelihood,
    model_label,
    responsibilities,
    update_A_mu0,
)
from roadhawkes.process.model import BACKGROUND, ModelComponents
from roadhawkes.process.scenarios import (
    BENCHMARK_A,
    benchmark_model,
    homogeneous_model,
    two_bump_spatial,
)
from roadhawkes.process.simulator import SimSpec, simulate
from tests.helpers import benchmark_catalog, catalog, central_mare, flat_model, uniform_catalog


# ---------- A and mu0 ----------
def test_update_hand_values() -> None:
    upd = update_A_mu0(93.0, 95.0, 1000.0, 100)
    assert upd.A == pytest.approx(0.0736842, abs=1e-7)
    assert upd.mu0 == pytest.approx(0.093, abs=1e-12)
    assert not upd.saturated


def test_all_background_gives_zero_A() -> None:
    upd = update_A_mu0(np.ones(50), 30.0, 10.0, 50)
    assert upd.A == 0.0
    assert upd.mu0 == 5.0


def test_all_triggered_is_saturated() -> None:
    upd = update_A_mu0(0.0, 40.0, 10.0, 40)
    assert upd.A == 1.0
    assert upd.saturated


def test_update_rejects_inconsistent_state() -> None:
    with pytest.raises(InconsistentStateError):
        update_A_mu0(5.0, 0.0, 10.0, 10)
    with pytest.raises(InconsistentStateError):
        update_A_mu0(10.0, 1.0, 0.0, 10)


# ---------- U, G and the likelihood ----------
def test_U_for_flat_curves() -> None:
    cat = catalog([(1.0, 10.0), (2.0, 20.0)], T=100.0, X=1000.0)
    U, _ = compute_U_G(flat_model(cat.domain, 1e-3), cat)
    assert U == pytest.approx(100.0 * 1000.0, rel=1e-12)


def test_G_truncated_at_edges() -> None:
    cat = catalog([(0.0, 500.0)], T=100.0, X=1000.0)
    model = ModelComponents.initial(cat.domain, FitConfig(), 1e-3, 0.2)
    _, G = compute_U_G(model, cat)
    assert G == pytest.approx((100.0 / 720.0) * (500.0 / 10000.0), rel=1e-9)


def test_G_counts_events_far_from_edges() -> None:
    dom = StudyDomain(T=100000.0, X=100000.0)
    rng = np.random.default_rng(6)
    n = 200
    cat = EventCatalog(dom, rng.uniform(0, 50000, n), rng.uniform(20000, 100000, n))
    _, G = compute_U_G(flat_model(dom, 1e-9, 0.2), cat)
    assert G == pytest.approx(n, rel=1e-6)


def test_homogeneous_log_likelihood_matches() -> None:
    cat = uniform_catalog(np.random.default_rng(9), 80, 500.0, 2000.0)
    rate = len(cat) / (500.0 * 2000.0)
    model = homogeneous_model(cat.domain, rate)
    assert log_likelihood(model, cat) == pytest.approx(homogeneous_log_likelihood(cat), rel=1e-9)


# ---------- labels ----------
@pytest.mark.parametrize(
    "enabled, want",
    [
        ((), "Fixed Rate Poisson Process"),
        (("daily", "weekly"), "Daily + Weekly Background"),
        (("daily", "weekly", "trend"), "Daily + Weekly + Trend Background"),
        (("daily", "weekly", "trend", "triggering"), "Daily + Weekly + Trend + Triggering"),
        (("triggering",), "Triggering"),
        (None, "Daily + Weekly + Trend + Spatial + Triggering"),
    ],
)
def test_model_label(enabled, want: str) -> None:
    assert model_label(enabled) == want


def test_nested_models_grow() -> None:
    assert NESTED_MODELS[0] == frozenset()
    assert NESTED_MODELS[-1] == frozenset(BACKGROUND + ("triggering",))
    assert len(NESTED_MODELS) == 6


# ---------- hotspots ----------
def test_flat_curve_has_no_hotspots() -> None:
    assert extract_hotspots(ComponentCurve.flat("spatial", 0.0, 1000.0, 11)) == []


def test_two_bumps_two_hotspots() -> None:
    X = 180000.0
    c = ComponentCurve.from_function(
        "spatial", two_bump_spatial, 0.0, X, 1801, periodic=False, normalize="mean"
    )
    spots = extract_hotspots(c)
    assert len(spots) == 2
    (a0, b0), (a1, b1) = spots
    assert a0 < 25000.0 < b0
    assert a1 < 140000.0 < b1


def test_ring_hotspot_wraps_seam() -> None:
    X = 20000.0

    def seam_bump(x: np.ndarray) -> np.ndarray:
        d = np.minimum(x, X - x)
        out: np.ndarray = 0.2 + np.exp(-0.5 * (d / 1000.0) ** 2)
        return out

    c = ComponentCurve.from_function("spatial", seam_bump, 0.0, X, 201, periodic=True, normalize="mean")
    spots = extract_hotspots(c)
    assert len(spots) == 1
    lo, hi = spots[0]
    assert lo > hi
    assert abs(hi - 2040.0) < 100.0
    assert abs(lo - (X - 2040.0)) < 100.0

    ring = StudyDomain(T=10.0, X=X, spatial_is_ring=True)
    cat = EventCatalog(ring, np.array([1.0, 2.0, 3.0]), np.array([500.0, 10000.0, 19500.0]))
    assert hotspot_counts(cat, spots) == [2]


# ---------- the loop ----------
def test_too_few_events() -> None:
    cat = uniform_catalog(np.random.default_rng(0), 9, 1000.0, 1000.0)
    with pytest.raises(CatalogError):
        fit(cat)


def test_background_only_fit() -> None:
    cat = uniform_catalog(np.random.default_rng(3), 200, 20000.0, 30000.0)
    model, report = fit(cat, FitConfig(max_iters=5), enabled=BACKGROUND)
    assert model.A == 0.0
    assert not model.is_enabled("triggering")
    assert report.n_iterations <= 5
    psi, pairs = responsibilities(model, cat)
    assert np.all(psi == 1.0)
    assert len(pairs) == 0
    U, _ = compute_U_G(model, cat)
    assert model.mu0 * U == pytest.approx(len(cat), rel=1e-9)


def test_disabled_components_stay_flat() -> None:
    cat = uniform_catalog(np.random.default_rng(4), 150, 20000.0, 30000.0)
    model, _ = fit(cat, FitConfig(max_iters=3), enabled=("daily", "triggering"))
    assert np.all(model.weekly.values == 1.0)
    assert np.all(model.trend.values == 1.0)
    assert np.all(model.spatial.values == 1.0)


def test_partition_holds_every_iteration() -> None:
    dom = StudyDomain(T=20000.0, X=50000.0)
    truth = flat_model(dom, 300 * 0.7 / (dom.T * dom.X), 0.3)
    cat = simulate(SimSpec(truth, 11)).catalog
    model, report = fit(cat, FitConfig(max_iters=5))
    assert report.n_iterations >= 1
    assert all(rec.partition_error < 1e-10 for rec in report.iterations)
    assert 0.0 <= model.A < 0.99
    assert abs(model.g.total() - 1.0) < 1e-3
    assert abs(model.h.total() - 1.0) < 1e-3
    assert abs(model.daily.mean() - 1.0) < 1e-6
    assert log_likelihood(model, cat) >= homogeneous_log_likelihood(cat)


@pytest.mark.slow
def test_recovers_branching_ratio() -> None:
    fitted = []
    for seed in range(3):
        model, _ = fit(benchmark_catalog(seed))
        fitted.append(model.A)
    assert abs(statistics.median(fitted) - BENCHMARK_A) <= 0.03


@pytest.mark.slow
def test_recovers_background_curves() -> None:
    model, _ = fit(benchmark_catalog(4))
    truth = benchmark_model(model.domain)
    flat = np.ones_like
    for est, want in (
        (model.daily, truth.daily),
        (model.weekly, flat),
        (model.trend, flat),
        (model.spatial, truth.spatial),
    ):
        assert central_mare(est, want, est.grid) <= 0.15, est.axis

    d = model.daily
    morning = d.grid[(d.grid > 300) & (d.grid < 660)]
    evening = d.grid[(d.grid > 870) & (d.grid < 1230)]
    peak_m = float(morning[np.argmax(d(morning))])
    peak_e = float(evening[np.argmax(d(evening))])
    omega = model.config.omega_d
    assert abs(peak_m - 480.0) <= 2 * omega
    assert abs(peak_e - 1050.0) <= 2 * omega


def _month(seed: int) -> EventCatalog:
    return benchmark_catalog(seed, days=30, events=600.0)


@pytest.mark.slow
def test_nested_log_likelihoods_increase() -> None:
    cat = _month(0)
    ll = [homogeneous_log_likelihood(cat)]
    for enabled in (("daily", "weekly"), ("daily", "weekly", "trend"), None):
        model, _ = fit(cat, enabled=enabled)
        ll.append(log_likelihood(model, cat))
    assert ll[0] < ll[1] < ll[2] < ll[3]


@pytest.mark.slow
@pytest.mark.parametrize("seed", [1, 2])
def test_start_does_not_matter(seed: int) -> None:
    cat = _month(seed)
    low, _ = fit(cat, initial_A=0.01)
    high, _ = fit(cat, initial_A=0.3)
    assert abs(low.A - high.A) < 0.01
    assert low.mu0 == pytest.approx(high.mu0, rel=0.02)


@pytest.mark.slow
def test_converged_state_is_a_fixed_point() -> None:
    cat = _month(3)
    model, report = fit(cat)
    assert report.converged
    psi, pairs = responsibilities(model, cat)
    assert np.max(np.abs(psi + pairs.rho_sums() - 1.0)) < 1e-10
    U, G = compute_U_G(model, cat)
    upd = update_A_mu0(psi, G, U, len(cat))
    tol = model.config.tol
    assert abs(upd.A - model.A) < tol
    assert abs(upd.mu0 - model.mu0) < tol * model.mu0
