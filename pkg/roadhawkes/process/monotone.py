# roadhawkes/process/monotone.py
"""
Monotone adjustment of a kernel-smoothed triggering density.

Given base weights Y_i at centers X_i, find probabilities p on the simplex,
as close to uniform as possible in the sense of

    D0(p) = -sum_i log(N p_i),

such that the adjusted fit

    f(y) = sum_i N Y_i p_i phi_i(y) 1{y <= c_i} / D(y)

rises by no more than eps per unit between neighbouring check points.
phi_i is point i's mirrored, mass-normalized kernel, c_i its cutoff and
D(y) the repetition divisor (both optional). A trigger curve's cache is
exactly f on its grid with linear interpolation in between, so checking
on the curve's own grid bounds the slope of the curve that is emitted.
Every f(y_k) is linear in p, so the constraints are linear and the
objective is convex.

The program is solved through its dual, which has one variable per check
interval instead of one per data point: at the optimum p_i = 1 / (nu + a_i.lam)
where a_i is point i's constraint column. The dual is smooth once log is
replaced below a small threshold by its quadratic continuation, and is
minimized with L-BFGS-B. A strictly feasible point from a small linear
program both proves feasibility up front and repairs the last 1e-9 of
violation the dual solve leaves behind.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import linprog, minimize

from roadhawkes.errors import MonotoneConvergenceError, MonotoneInfeasibleError
from roadhawkes.process.curves import TriggerCurve, repetition_divisor
from roadhawkes.process.kernels import gaussian, mixture_slope

log = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

SLOPE_TOL = 1e-9


def _empty() -> FloatArray:
    return np.zeros(0, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class MonotoneProblem:
    centers: FloatArray
    base_weights: FloatArray
    bandwidth: float
    check: FloatArray
    eps: float = 0.0
    mirror: bool = True
    masses: FloatArray = field(default_factory=_empty)
    cutoffs: FloatArray = field(default_factory=_empty)
    support_lengths: FloatArray = field(default_factory=_empty)

    def __post_init__(self) -> None:
        c = np.asarray(self.centers, dtype=np.float64).reshape(-1)
        y = np.asarray(self.base_weights, dtype=np.float64).reshape(-1)
        if c.size < 1 or c.size != y.size:
            raise MonotoneInfeasibleError(
                f"need matching, nonempty centers and weights, got {c.size} and {y.size}"
            )
        if not (self.eps >= 0 and math.isfinite(self.eps)):
            raise MonotoneInfeasibleError(f"eps must be >= 0, got {self.eps!r}")
        m = np.asarray(self.masses, dtype=np.float64).reshape(-1)
        if m.size == 0:
            m = np.ones_like(c)
        cut = np.asarray(self.cutoffs, dtype=np.float64).reshape(-1)
        if cut.size not in (0, c.size):
            raise MonotoneInfeasibleError(f"got {cut.size} cutoffs for {c.size} centers")
        chk = np.asarray(self.check, dtype=np.float64).reshape(-1)
        if np.any(np.diff(chk) <= 0):
            raise MonotoneInfeasibleError("check points must be strictly increasing")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "base_weights", y)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "cutoffs", cut)
        object.__setattr__(
            self,
            "support_lengths",
            np.asarray(self.support_lengths, dtype=np.float64).reshape(-1),
        )
        object.__setattr__(self, "check", chk)

    @property
    def n(self) -> int:
        return int(self.centers.size)

    @property
    def smooth(self) -> bool:
        """No cutoffs and no divisor: the fit is a plain kernel mixture."""
        return self.cutoffs.size == 0 and self.support_lengths.size == 0

    def _images(self) -> list[FloatArray]:
        return [self.centers, -self.centers] if self.mirror else [self.centers]

    def value_rows(self, at: ArrayLike) -> FloatArray:
        """Row k, column i: point i's share of the fit at `at[k]` per unit of p_i."""
        y = np.asarray(at, dtype=np.float64).reshape(-1)
        out = np.zeros((y.size, self.n), dtype=np.float64)
        for img in self._images():
            out += gaussian(y[:, None] - img[None, :], self.bandwidth)
        out *= (self.n * self.base_weights / self.masses)[None, :]
        if self.cutoffs.size:
            out[y[:, None] > self.cutoffs[None, :]] = 0.0
        if self.support_lengths.size:
            d = repetition_divisor(self.support_lengths, y)
            out = np.where((d > 0)[:, None], out / np.maximum(d, 1.0)[:, None], 0.0)
        return out

    def slope_rows(self, at: Optional[ArrayLike] = None) -> FloatArray:
        """Row k: the fit's slope between points k and k + 1, as a linear form in p."""
        y = self.check if at is None else np.asarray(at, dtype=np.float64).reshape(-1)
        if y.size < 2:
            return np.zeros((0, self.n), dtype=np.float64)
        v = self.value_rows(y)
        out: FloatArray = np.diff(v, axis=0) / np.diff(y)[:, None]
        return out

    def fit(self, p: ArrayLike, at: ArrayLike) -> FloatArray:
        """The adjusted fit at `at`."""
        out: FloatArray = self.value_rows(at) @ np.asarray(p, dtype=np.float64)
        return out


@dataclass(frozen=True, eq=False)
class MonotoneSolution:
    p: FloatArray
    d0: float
    problem: MonotoneProblem

    @property
    def adjusted_weights(self) -> FloatArray:
        out: FloatArray = self.problem.base_weights * self.problem.n * self.p
        return out

    def curve(self, at: ArrayLike) -> FloatArray:
        return self.problem.fit(self.p, at)


def divergence(p: ArrayLike) -> float:
    """D0(p) = -sum log(N p_i); zero exactly at the uniform vector."""
    pa = np.asarray(p, dtype=np.float64)
    if np.any(pa <= 0):
        return math.inf
    return float(-np.sum(np.log(pa.size * pa)))


def _log_star(s: FloatArray, delta: float) -> tuple[FloatArray, FloatArray]:
    """log(s) continued quadratically below delta; value and derivative."""
    safe = np.maximum(s, delta)
    low = s < delta
    r = s / delta
    val = np.where(low, math.log(delta) - 1.5 + 2.0 * r - 0.5 * r * r, np.log(safe))
    der = np.where(low, (2.0 - r) / delta, 1.0 / safe)
    return val, der


def _interior_point(rows: FloatArray, rhs: FloatArray, n: int) -> tuple[FloatArray, float]:
    """
    Maximize the common slack tau in rows @ p + tau <= rhs over the simplex.
    Rows are pre-scaled so slacks are comparable.
    """
    m = rows.shape[0]
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.hstack([rows, np.ones((m, 1))])
    a_eq = np.hstack([np.ones((1, n)), np.zeros((1, 1))])
    bounds = [(0.0, 1.0)] * n + [(None, 1.0)]
    res = linprog(c, A_ub=a_ub, b_ub=rhs, A_eq=a_eq, b_eq=[1.0], bounds=bounds, method="highs")
    if res.status != 0:
        raise MonotoneConvergenceError(f"feasibility program failed: {res.message}")
    x = np.asarray(res.x, dtype=np.float64)
    return np.clip(x[:n], 0.0, None), float(x[-1])


def solve_monotone(problem: MonotoneProblem, max_iter: int = 5000) -> MonotoneSolution:
    n = problem.n
    uniform = np.full(n, 1.0 / n)
    rows = problem.slope_rows()
    scale = np.max(np.abs(rows), axis=1) if rows.size else np.zeros(0)
    live = scale > 0
    rows, scale = rows[live], scale[live]
    check = problem.check[:-1][live]
    eps = problem.eps

    if rows.shape[0] == 0 or np.all(rows @ uniform <= eps + SLOPE_TOL):
        return MonotoneSolution(uniform, 0.0, problem)

    a = rows / scale[:, None]
    b = eps / scale
    p_feas, tau = _interior_point(a, b, n)
    if tau < -SLOPE_TOL:
        viol = (rows @ p_feas) > eps + SLOPE_TOL
        raise MonotoneInfeasibleError(
            "no weighting makes the curve non-increasing", check[viol].tolist()
        )

    delta = 1.0 / (2.0 * n)
    m = a.shape[0]

    def objective(z: FloatArray) -> tuple[float, FloatArray]:
        lam, nu = z[:m], z[m]
        s = nu + a.T @ lam
        val, der = _log_star(s, delta)
        f = -float(val.sum()) + nu + float(b @ lam) - n
        grad = np.empty(m + 1)
        grad[:m] = -(a @ der) + b
        grad[m] = 1.0 - float(der.sum())
        return f, grad

    z0 = np.zeros(m + 1)
    z0[m] = float(n)
    res = minimize(
        objective,
        z0,
        jac=True,
        method="L-BFGS-B",
        bounds=[(0.0, None)] * m + [(None, None)],
        options={"maxiter": max_iter, "ftol": 1e-15, "gtol": 1e-12},
    )
    s = res.x[m] + a.T @ res.x[:m]
    if not np.all(s > 0):
        raise MonotoneConvergenceError(f"dual solve left nonpositive weights ({res.message})")
    p = 1.0 / s
    p = p / p.sum()

    excess = rows @ p - eps
    if np.any(excess > SLOPE_TOL):
        slack = eps - rows @ p_feas
        bad = excess > 0
        if tau <= 0 or np.any(slack[bad] <= 0):
            raise MonotoneConvergenceError(
                f"solution violates slope bound by {float(excess.max()):.3g} and no strictly "
                "feasible point exists to repair it"
            )
        theta = float(np.max(excess[bad] / (excess[bad] + slack[bad])))
        p = (1.0 - theta) * p + theta * p_feas
        p = p / p.sum()
        excess = rows @ p - eps
        if np.any(excess > SLOPE_TOL):
            raise MonotoneConvergenceError(
                f"solution violates slope bound by {float(excess.max()):.3g}"
            )
        log.debug("monotone: repaired dual solution with theta=%.3g", theta)

    if np.any(p <= 0):
        raise MonotoneConvergenceError("solution has a zero weight")

    sol = MonotoneSolution(p, divergence(p), problem)
    _audit(sol)
    return sol


def _audit(sol: MonotoneSolution) -> None:
    """Check a plain mixture's analytic slope on a grid four times denser than the check grid."""
    problem = sol.problem
    chk = problem.check
    if chk.size < 2 or not problem.smooth:
        return
    dense = np.linspace(chk[0], chk[-1], 4 * (chk.size - 1) + 1)
    coef = problem.n * problem.base_weights * sol.p / problem.masses
    slope = mixture_slope(dense, problem._images(), problem.bandwidth) @ coef
    worst = float(slope.max()) - problem.eps
    ref = float(np.max(np.abs(slope)))
    if worst > 1e-6 * max(ref, 1.0):
        log.warning("monotone: slope exceeds bound by %.3g between check points", worst)


def monotone_adjust(curve: TriggerCurve, eps: float = 0.0) -> tuple[TriggerCurve, MonotoneSolution]:
    """
    Reweight a smoothed trigger curve so it is non-increasing.

    The constraints sit on the curve's own cache grid and include its
    cutoffs and repetition divisor, so the returned curve is the solved fit
    itself, rescaled to unit integral.

    Raises MonotoneInfeasibleError or MonotoneConvergenceError; the caller
    decides whether to keep the unadjusted curve.
    """
    problem = MonotoneProblem(
        centers=curve.centers,
        base_weights=curve.weights,
        bandwidth=curve.bandwidth,
        check=curve.grid,
        eps=eps,
        mirror=True,
        masses=curve.masses,
        cutoffs=curve.cutoffs,
        support_lengths=curve.support_lengths,
    )
    sol = solve_monotone(problem)
    adjusted = TriggerCurve.build(
        "integral",
        axis=curve.axis,
        kind=curve.kind,
        lo=curve.lo,
        hi=curve.hi,
        points=curve.points,
        bandwidth=curve.bandwidth,
        centers=curve.centers,
        weights=sol.adjusted_weights,
        masses=curve.masses,
        cutoffs=curve.cutoffs,
        support_lengths=curve.support_lengths,
        monotone=True,
    )
    rise = float(np.max(np.diff(adjusted.raw) / np.diff(adjusted.grid)))
    if rise > eps + SLOPE_TOL:
        log.warning("monotone: %s rises by %.3g per unit after adjustment", curve.axis, rise)
    return adjusted, sol
