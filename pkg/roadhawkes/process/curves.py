# roadhawkes/process/curves.py
"""
Cached one-dimensional curves.

A curve is kept as its recipe (kernel kind, bandwidth, centers, weights,
per-point masses and a scale constant) plus a cache of values on a uniform
grid. Evaluation between grid points is linear interpolation; integrals are
exact integrals of that interpolant, so they agree with the trapezoid rule
at grid points.

Rebuilding a curve from its recipe runs the same code path that built it,
so a saved and reloaded curve evaluates bit-identically.
"""

from __future__ import annotations

import math
from dataclasses import InitVar, dataclass, field, replace
from typing import Any, Callable, ClassVar, Literal, Optional, Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import cumulative_trapezoid

from roadhawkes.errors import KernelError
from roadhawkes.process.kernels import (
    mirror_images,
    mixture,
    periodic_images,
    periodic_masses,
    truncated_masses,
)

FloatArray = NDArray[np.float64]

CurveKind = Literal["flat", "tabulated", "periodic", "truncated", "trigger"]
Normalize = Literal["mean", "integral", "none"]


def _empty() -> FloatArray:
    return np.zeros(0, dtype=np.float64)


def repetition_divisor(support_lengths: ArrayLike, lag: ArrayLike) -> FloatArray:
    """How many points still have room for a lag this long."""
    s = np.sort(np.asarray(support_lengths, dtype=np.float64).reshape(-1))
    y = np.asarray(lag, dtype=np.float64)
    out: FloatArray = (s.size - np.searchsorted(s, y, side="left")).astype(np.float64)
    return out


def grid_points(lo: float, hi: float, step: float, max_points: int) -> int:
    """
    Number of grid points tiling [lo, hi] at a step no larger than
    max(step, (hi - lo) / max_points).
    """
    length = hi - lo
    if not (length > 0 and step > 0):
        raise KernelError(f"bad cache grid [{lo}, {hi}] step {step}")
    coarse = max(step, length / max_points)
    n = max(1, math.ceil(length / coarse - 1e-9))
    return n + 1


@dataclass(frozen=True, eq=False)
class KernelCurve:
    axis: str
    kind: CurveKind
    lo: float
    hi: float
    points: int
    periodic: bool = False
    bandwidth: float = 0.0
    centers: FloatArray = field(default_factory=_empty)
    weights: FloatArray = field(default_factory=_empty)
    masses: FloatArray = field(default_factory=_empty)
    cutoffs: FloatArray = field(default_factory=_empty)
    support_lengths: FloatArray = field(default_factory=_empty)
    table: FloatArray = field(default_factory=_empty)
    scale: float = 1.0
    monotone: bool = False
    degenerate: bool = False
    raw_cache: InitVar[Optional[FloatArray]] = None

    grid: FloatArray = field(init=False, repr=False)
    raw: FloatArray = field(init=False, repr=False)
    values: FloatArray = field(init=False, repr=False)
    cumulative_values: FloatArray = field(init=False, repr=False)

    ZERO_OUTSIDE: ClassVar[bool] = False

    def __post_init__(self, raw_cache: Optional[FloatArray]) -> None:
        if not self.lo < self.hi:
            raise KernelError(f"curve domain needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.points < 2:
            raise KernelError(f"curve cache needs >= 2 points, got {self.points}")
        for name in ("centers", "weights", "masses", "cutoffs", "support_lengths", "table"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).reshape(-1)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

        grid = np.linspace(self.lo, self.hi, self.points)
        raw = self._compute_raw(grid) if raw_cache is None else np.array(raw_cache)
        values = raw * self.scale
        cum = cumulative_trapezoid(values, grid, initial=0.0)
        for name, arr in (("grid", grid), ("raw", raw), ("values", values), ("cumulative_values", cum)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    # ---------- construction ----------

    def _compute_raw(self, grid: FloatArray) -> FloatArray:
        kind = self.kind
        if kind == "flat":
            raw = np.ones_like(grid)
        elif kind == "tabulated":
            if self.table.size != grid.size:
                raise KernelError(
                    f"{self.axis}: table has {self.table.size} values for {grid.size} grid points"
                )
            raw = np.array(self.table, dtype=np.float64)
        elif kind == "periodic":
            P = self.hi - self.lo
            raw = mixture(
                grid - self.lo,
                periodic_images(self.centers - self.lo, P),
                self.weights / self.masses,
                self.bandwidth,
            )
        elif kind == "truncated":
            raw = mixture(
                grid,
                mirror_images(self.centers, self.lo, self.hi, "both"),
                self.weights / self.masses,
                self.bandwidth,
            )
        elif kind == "trigger":
            raw = mixture(
                grid,
                mirror_images(self.centers, 0.0, math.inf, "lo"),
                self.weights / self.masses,
                self.bandwidth,
                cutoffs=self.cutoffs,
            )
            divisor = self.repetition_divisor(grid)
            raw = np.where(divisor > 0, raw / np.maximum(divisor, 1.0), 0.0)
        else:
            raise KernelError(f"unknown curve kind {kind!r}")

        if self.periodic:
            raw[-1] = raw[0]
        out: FloatArray = raw
        return out

    def repetition_divisor(self, lag: ArrayLike) -> FloatArray:
        return repetition_divisor(self.support_lengths, lag)

    @classmethod
    def build(cls, normalize: Normalize = "none", **recipe: Any) -> Self:
        """
        Build a curve and fix its scale: "mean" makes the average over the
        domain 1, "integral" makes the integral 1.
        """
        proto = cls(**recipe)
        total = float(proto.cumulative_values[-1])
        if normalize == "none":
            return proto
        if not (math.isfinite(total) and total > 0):
            raise KernelError(f"{proto.axis}: cannot normalize a curve with integral {total!r}")
        target = (proto.hi - proto.lo) if normalize == "mean" else 1.0
        scale = float(recipe.get("scale", 1.0)) * target / total
        return replace(proto, scale=scale, raw_cache=proto.raw)

    @classmethod
    def flat(
        cls,
        axis: str,
        lo: float,
        hi: float,
        points: int,
        value: float = 1.0,
        periodic: bool = False,
        degenerate: bool = False,
    ) -> Self:
        return cls(
            axis=axis,
            kind="flat",
            lo=lo,
            hi=hi,
            points=points,
            periodic=periodic,
            scale=float(value),
            degenerate=degenerate,
        )

    @classmethod
    def from_function(
        cls,
        axis: str,
        fn: Callable[[FloatArray], ArrayLike],
        lo: float,
        hi: float,
        points: int,
        periodic: bool = False,
        normalize: Normalize = "none",
    ) -> Self:
        """Tabulate an analytic shape on the cache grid."""
        grid = np.linspace(lo, hi, points)
        table = np.asarray(fn(grid), dtype=np.float64)
        if table.shape != grid.shape or np.any(table < 0) or not np.all(np.isfinite(table)):
            raise KernelError(f"{axis}: tabulated values must be finite and nonnegative")
        return cls.build(
            normalize,
            axis=axis,
            kind="tabulated",
            lo=lo,
            hi=hi,
            points=points,
            periodic=periodic,
            table=table,
        )

    # ---------- evaluation ----------

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.points - 1)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def _wrap(self, x: FloatArray) -> FloatArray:
        out: FloatArray = np.mod(x - self.lo, self.length) + self.lo
        return out

    def __call__(self, x: ArrayLike) -> FloatArray:
        xa = np.asarray(x, dtype=np.float64)
        if self.periodic:
            xa = self._wrap(xa)
        out: FloatArray = np.asarray(np.interp(xa, self.grid, self.values), dtype=np.float64)
        if self.ZERO_OUTSIDE:
            out = np.where((xa < self.lo) | (xa > self.hi), 0.0, out)
        return out

    def total(self) -> float:
        return float(self.cumulative_values[-1])

    def mean(self) -> float:
        return self.total() / self.length

    def maximum(self) -> float:
        return float(self.values.max())

    def _partial(self, x: FloatArray) -> FloatArray:
        xc = np.clip(x, self.lo, self.hi)
        k = np.clip(np.searchsorted(self.grid, xc, side="right") - 1, 0, self.points - 2)
        f = np.interp(xc, self.grid, self.values)
        out: FloatArray = self.cumulative_values[k] + (xc - self.grid[k]) * (self.values[k] + f) / 2.0
        return out

    def cumulative(self, x: ArrayLike) -> FloatArray:
        """Integral of the curve from `lo` to x (periodic curves keep winding)."""
        xa = np.asarray(x, dtype=np.float64)
        if not self.periodic:
            return self._partial(xa)
        turns = np.floor((xa - self.lo) / self.length)
        rest = xa - turns * self.length
        out: FloatArray = turns * self.total() + self._partial(rest)
        return out

    def sample(self, rng: np.random.Generator, n: int) -> FloatArray:
        """
        Inverse-CDF draws from the curve read as a density on [lo, hi].

        Within a grid cell the interpolant is linear, so the inverse of its
        quadratic integral is taken in closed form.
        """
        if n <= 0:
            return _empty()
        total = self.total()
        if not total > 0:
            raise KernelError(f"{self.axis}: cannot sample from a curve with zero mass")
        u = rng.random(n) * total
        cum = self.cumulative_values
        k = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, self.points - 2)
        r = u - cum[k]
        f0 = self.values[k]
        f1 = self.values[k + 1]
        w = self.step
        disc = np.maximum(f0 * f0 + 2.0 * r * (f1 - f0) / w, 0.0)
        denom = f0 + np.sqrt(disc)
        s = np.where(denom > 0, 2.0 * r / np.where(denom > 0, denom, 1.0), 0.0)
        out: FloatArray = np.clip(self.grid[k] + np.minimum(s, w), self.lo, self.hi)
        return out

    def export_rows(self) -> list[tuple[float, float]]:
        return list(zip(self.grid.tolist(), self.values.tolist()))


class ComponentCurve(KernelCurve):
    """A background modulation on its axis, scaled to mean 1."""


class TriggerCurve(KernelCurve):
    """A triggering density on [0, horizon], scaled to unit integral; zero outside."""

    ZERO_OUTSIDE: ClassVar[bool] = True


def periodic_masses_for(centers: ArrayLike, omega: float, lo: float, hi: float) -> FloatArray:
    return periodic_masses(np.asarray(centers, dtype=np.float64) - lo, omega, hi - lo)


def truncated_masses_for(centers: ArrayLike, omega: float, lo: float, hi: float) -> FloatArray:
    return truncated_masses(centers, omega, lo, hi, "both")
