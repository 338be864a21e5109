# tests/test_monotone.py
import itertools
import math
from dataclasses import replace

import numpy as np
import pytest

from roadhawkes.errors import MonotoneInfeasibleError
from roadhawkes.process.curves import TriggerCurve
from roadhawkes.process.monotone import (
    SLOPE_TOL,
    MonotoneProblem,
    divergence,
    monotone_adjust,
    solve_monotone,
)
from roadhawkes.process.triggering import PairSet, estimate_g

CHECK = np.linspace(0.0, 15.0, 31)

FIXTURES = [
    ([1.0, 4.0, 7.0], [1.0, 1.0, 3.0], 3.0),
    ([1.0, 3.0, 6.0, 9.0], [1.0, 1.0, 1.0, 2.0], 2.5),
]


def _simplex_grid(n: int, step: float = 0.01) -> np.ndarray:
    """Every point of the open simplex with coordinates on the `step` lattice."""
    m = int(round(1.0 / step))
    pts = [c for c in itertools.product(range(1, m), repeat=n - 1) if sum(c) < m]
    head = np.array(pts, dtype=np.float64) * step
    return np.hstack([head, 1.0 - head.sum(axis=1, keepdims=True)])


def _brute_force(problem: MonotoneProblem) -> float:
    P = _simplex_grid(problem.n)
    ok = np.all(problem.slope_rows() @ P.T <= problem.eps + 1e-12, axis=0)
    if not np.any(ok):
        return math.inf
    return float(np.min(-np.sum(np.log(problem.n * P[ok]), axis=1)))


# ---------- divergence ----------
def test_divergence_hand_value() -> None:
    assert divergence([0.25, 0.75]) == pytest.approx(0.287682, abs=1e-6)


def test_divergence_nonnegative() -> None:
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = rng.dirichlet(np.ones(5))
        assert divergence(p) >= 0.0
    assert divergence(np.full(5, 0.2)) == pytest.approx(0.0, abs=1e-15)
    assert divergence([0.0, 1.0]) == math.inf


# ---------- solver ----------
def test_already_monotone_is_uniform() -> None:
    problem = MonotoneProblem(np.array([1.0, 2.0]), np.array([1.0, 1.0]), 3.0, CHECK)
    sol = solve_monotone(problem)
    assert sol.p.tolist() == [0.5, 0.5]
    assert abs(sol.d0) <= 1e-12


@pytest.mark.parametrize("centers, weights, omega", FIXTURES)
def test_matches_simplex_grid_search(centers, weights, omega) -> None:
    problem = MonotoneProblem(np.array(centers), np.array(weights), omega, CHECK)
    assert np.any(problem.slope_rows() @ np.full(problem.n, 1.0 / problem.n) > 0)

    best = _brute_force(problem)
    assert math.isfinite(best)
    sol = solve_monotone(problem)

    assert sol.p.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(sol.p > 0)
    assert np.all(problem.slope_rows() @ sol.p <= 1e-9)
    assert sol.d0 <= best + 1e-3


@pytest.mark.parametrize("centers, weights, omega", FIXTURES)
def test_adjusted_fit_is_non_increasing(centers, weights, omega) -> None:
    problem = MonotoneProblem(np.array(centers), np.array(weights), omega, CHECK)
    sol = solve_monotone(problem)
    f = sol.curve(CHECK)
    assert np.all(np.diff(f) <= 1e-3 * f.max())
    assert f[0] > f[-1]


def test_slack_allows_small_rise() -> None:
    problem = MonotoneProblem(np.array([1.0, 4.0, 7.0]), np.array([1.0, 1.0, 3.0]), 3.0, CHECK)
    loose = MonotoneProblem(problem.centers, problem.base_weights, 3.0, CHECK, eps=1.0)
    assert solve_monotone(loose).d0 <= solve_monotone(problem).d0


@pytest.mark.parametrize("centers, weights, omega", FIXTURES)
def test_no_pairwise_transfer_lowers_divergence(centers, weights, omega) -> None:
    problem = MonotoneProblem(np.array(centers), np.array(weights), omega, CHECK)
    sol = solve_monotone(problem)
    rows = problem.slope_rows()
    delta = 1e-6
    tried = 0
    for i, j in itertools.permutations(range(problem.n), 2):
        q = sol.p.copy()
        q[i] += delta
        q[j] -= delta
        if q[j] <= 0 or np.any(rows @ q > problem.eps):
            continue
        tried += 1
        assert divergence(q) >= sol.d0 - 1e-8
    assert tried > 0


def test_tighter_bound_never_lowers_divergence() -> None:
    centers, weights, omega = FIXTURES[0]
    d0 = [
        solve_monotone(
            MonotoneProblem(np.array(centers), np.array(weights), omega, CHECK, eps=eps)
        ).d0
        for eps in (0.5, 0.1, 0.03, 0.01, 0.0)
    ]
    assert all(b >= a - 1e-6 * max(1.0, b) for a, b in zip(d0, d0[1:]))
    assert d0[-1] > 0.0


def test_single_bump_is_infeasible() -> None:
    problem = MonotoneProblem(np.array([5.0]), np.array([1.0]), 1.0, CHECK, mirror=False)
    with pytest.raises(MonotoneInfeasibleError) as ei:
        solve_monotone(problem)
    assert ei.value.violated
    assert all(v < 5.0 for v in ei.value.violated)


def test_problem_rejects_mismatched_input() -> None:
    with pytest.raises(MonotoneInfeasibleError):
        MonotoneProblem(np.array([1.0, 2.0]), np.array([1.0]), 1.0, CHECK)
    with pytest.raises(MonotoneInfeasibleError):
        MonotoneProblem(np.array([1.0]), np.array([1.0]), 1.0, CHECK, eps=-1.0)


# ---------- cutoffs and divisor ----------
def test_rows_follow_cutoffs_and_divisor() -> None:
    centers, weights = np.array([1.0, 4.0, 7.0]), np.array([1.0, 1.0, 3.0])
    cutoffs, room = np.array([15.0, 6.0, 15.0]), np.array([2.0, 9.0, 20.0, 20.0])
    problem = MonotoneProblem(
        centers, weights, 3.0, CHECK, cutoffs=cutoffs, support_lengths=room
    )
    p = np.array([0.2, 0.3, 0.5])
    f = problem.fit(p, CHECK)
    assert np.allclose(problem.slope_rows() @ p, np.diff(f) / np.diff(CHECK), rtol=1e-12, atol=1e-15)

    plain = MonotoneProblem(centers, weights, 3.0, CHECK).fit(p, CHECK)
    near = CHECK <= 2.0
    assert np.allclose(f[near], plain[near] / 4.0, rtol=1e-12)

    curve = TriggerCurve.build(
        "none",
        axis="g",
        kind="trigger",
        lo=0.0,
        hi=15.0,
        points=CHECK.size,
        bandwidth=3.0,
        centers=centers,
        weights=3 * weights * p,
        masses=np.ones(3),
        cutoffs=cutoffs,
        support_lengths=room,
    )
    assert np.allclose(curve.raw, f, rtol=1e-12, atol=0.0)


def test_room_running_out_on_a_flat_stretch_is_infeasible() -> None:
    # the divisor falls from 3 to 2 between 0 and 1 where the kernel is nearly flat
    problem = MonotoneProblem(
        np.array([0.0]),
        np.array([1.0]),
        20.0,
        np.array([0.0, 1.0, 2.0, 3.0]),
        support_lengths=np.array([0.5, 10.0, 10.0]),
    )
    with pytest.raises(MonotoneInfeasibleError) as ei:
        solve_monotone(problem)
    assert ei.value.violated == [0.0]


def _hump_with_late_events() -> tuple[PairSet, np.ndarray]:
    """Children 5 or 60 minutes after 40 parents, plus 100 events whose room ends between 300 and 399."""
    parents = np.arange(40) * 10.0
    lags = np.where(np.arange(40) % 2 == 0, 5.0, 60.0)
    late = 2000.0 - 300.0 - np.arange(100.0)
    t = np.concatenate([parents, parents + lags, late])
    pairs = PairSet(t.size, np.arange(40), np.arange(40, 80), lags, np.full(40, 100.0), np.full(40, 0.5))
    return pairs, t


def test_adjusted_curve_is_the_solved_fit() -> None:
    pairs, t = _hump_with_late_events()
    g = estimate_g(pairs, 20.0, 2000.0, t)
    room = g.repetition_divisor(g.grid)
    assert (room.max(), room.min()) == (180.0, 80.0)

    adjusted, sol = monotone_adjust(g)
    assert sol.d0 > 0.0
    assert sol.d0 == divergence(sol.p)
    assert np.allclose(adjusted.raw, sol.curve(adjusted.grid), rtol=1e-10, atol=0.0)
    assert np.all(np.diff(adjusted.raw) <= SLOPE_TOL * np.diff(adjusted.grid) + 1e-15)
    assert np.array_equal(replace(adjusted, monotone=False).values, adjusted.values)
    assert adjusted.total() == pytest.approx(1.0, abs=1e-9)


def test_monotone_adjust_keeps_monotone_curve() -> None:
    t = np.array([0.0, 2000.0, 4000.0, 5.0, 2010.0, 4015.0])
    pairs = PairSet(
        6,
        np.array([0, 1, 2]),
        np.array([3, 4, 5]),
        np.array([5.0, 10.0, 15.0]),
        np.array([100.0, 100.0, 100.0]),
        np.ones(3),
    )
    g = estimate_g(pairs, 30.0, 100000.0, t)
    adjusted, sol = monotone_adjust(g)
    assert sol.d0 == 0.0
    assert adjusted.monotone
    assert adjusted.total() == pytest.approx(1.0, abs=1e-9)
    assert np.all(np.diff(adjusted.values) <= 0.0)
    assert np.allclose(adjusted.values, g.values, rtol=1e-9, atol=1e-15)
