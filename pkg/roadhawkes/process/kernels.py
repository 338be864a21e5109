# roadhawkes/process/kernels.py
"""
Gaussian kernels with per-point normalization.

Three domain kinds:

    - line        plain Gaussian on the real line
    - truncated   [lo, hi], with the kernel mirrored across finite boundaries
                  and renormalized to unit mass on [lo, hi]
    - periodic    [0, P), the kernel plus one copy a period either side,
                  renormalized to unit mass on [0, P)

Normalizing masses come from the Gaussian CDF (`scipy.special.ndtr`), never
from quadrature. `mixture` evaluates a whole weighted sum on a grid in
center chunks so memory stays bounded for large catalogs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import ndtr

from roadhawkes.errors import KernelError

FloatArray = NDArray[np.float64]

Mirror = Literal["both", "lo", "hi", "none"]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# grid points x centers evaluated per chunk
_CHUNK_CELLS = 4_000_000


@dataclass(frozen=True)
class KernelSpec:
    bandwidth: float
    kind: Literal["line", "truncated", "periodic"] = "line"
    center: float = 0.0
    lo: float = -math.inf
    hi: float = math.inf
    period: float = 0.0

    def __post_init__(self) -> None:
        _check_bandwidth(self.bandwidth)
        if self.kind == "truncated":
            if not self.lo < self.hi:
                raise KernelError(f"truncated domain needs lo < hi, got [{self.lo}, {self.hi}]")
        elif self.kind == "periodic":
            if not (math.isfinite(self.period) and self.period > 0):
                raise KernelError(f"period must be positive, got {self.period!r}")
        elif self.kind != "line":
            raise KernelError(f"unknown kernel domain kind {self.kind!r}")

    @classmethod
    def truncated(cls, bandwidth: float, lo: float, hi: float, center: float) -> "KernelSpec":
        return cls(bandwidth, "truncated", center, lo=lo, hi=hi)

    @classmethod
    def periodic(cls, bandwidth: float, period: float, center: float) -> "KernelSpec":
        return cls(bandwidth, "periodic", center, period=period)


def _check_bandwidth(omega: float) -> None:
    if not (math.isfinite(omega) and omega > 0):
        raise KernelError(f"bandwidth must be positive, got {omega!r}")


def gaussian(u: ArrayLike, omega: float) -> FloatArray:
    _check_bandwidth(omega)
    z = np.asarray(u, dtype=np.float64) / omega
    out: FloatArray = (_INV_SQRT_2PI / omega) * np.exp(-0.5 * z * z)
    return out


def gaussian_mass(mu: ArrayLike, omega: float, lo: float, hi: float) -> FloatArray:
    """Mass of N(mu, omega^2) on [lo, hi]; infinite bounds allowed."""
    m = np.asarray(mu, dtype=np.float64)
    upper = ndtr((hi - m) / omega) if math.isfinite(hi) else np.ones_like(m)
    lower = ndtr((lo - m) / omega) if math.isfinite(lo) else np.zeros_like(m)
    out: FloatArray = upper - lower
    return out


def mirror_images(
    centers: ArrayLike, lo: float, hi: float, mirror: Mirror = "both"
) -> list[FloatArray]:
    """The centers of every Gaussian term: the data points plus reflections."""
    c = np.asarray(centers, dtype=np.float64)
    terms = [c]
    if mirror in ("both", "lo") and math.isfinite(lo):
        terms.append(2.0 * lo - c)
    if mirror in ("both", "hi") and math.isfinite(hi):
        terms.append(2.0 * hi - c)
    return terms


def truncated_masses(
    centers: ArrayLike, omega: float, lo: float, hi: float, mirror: Mirror = "both"
) -> FloatArray:
    masses = sum(gaussian_mass(m, omega, lo, hi) for m in mirror_images(centers, lo, hi, mirror))
    return np.asarray(masses, dtype=np.float64)


def periodic_images(centers: ArrayLike, period: float) -> list[FloatArray]:
    c0 = np.mod(np.asarray(centers, dtype=np.float64), period)
    return [c0 - period, c0, c0 + period]


def periodic_masses(centers: ArrayLike, omega: float, period: float) -> FloatArray:
    masses = sum(gaussian_mass(m, omega, 0.0, period) for m in periodic_images(centers, period))
    return np.asarray(masses, dtype=np.float64)


def weight_truncated(x: float, spec: KernelSpec, mirror_at: Optional[Mirror] = None) -> float:
    """
    Normalized kernel value at `x` for a point at `spec.center`.

    `mirror_at` picks the reflecting boundaries; by default every finite
    boundary reflects.
    """
    if spec.kind == "line":
        return float(gaussian(x - spec.center, spec.bandwidth))
    if spec.kind != "truncated":
        raise KernelError(f"weight_truncated needs a truncated spec, got {spec.kind!r}")
    if not spec.lo <= x <= spec.hi:
        raise KernelError(f"x={x!r} outside [{spec.lo}, {spec.hi}]")
    mirror: Mirror = mirror_at or "both"
    images = mirror_images([spec.center], spec.lo, spec.hi, mirror)
    raw = sum(float(gaussian(x - m[0], spec.bandwidth)) for m in images)
    mass = float(truncated_masses([spec.center], spec.bandwidth, spec.lo, spec.hi, mirror)[0])
    return raw / mass


def weight_periodic(x: float, spec: KernelSpec) -> float:
    if spec.kind != "periodic":
        raise KernelError(f"weight_periodic needs a periodic spec, got {spec.kind!r}")
    P = spec.period
    xw = float(np.mod(x, P))
    raw = sum(float(gaussian(xw - m[0], spec.bandwidth)) for m in periodic_images([spec.center], P))
    mass = float(periodic_masses([spec.center], spec.bandwidth, P)[0])
    return raw / mass


# ---------- mixtures on a grid ----------


def mixture(
    grid: ArrayLike,
    images: list[FloatArray],
    coef: ArrayLike,
    omega: float,
    cutoffs: Optional[ArrayLike] = None,
) -> FloatArray:
    """
    sum_i coef_i * sum_terms gaussian(grid - image_term_i, omega)

    With `cutoffs`, point i contributes nothing to grid values above
    cutoffs[i]. The reduction runs over fixed chunks in center order so the
    result does not depend on how the work is split.
    """
    g = np.asarray(grid, dtype=np.float64)
    a = np.asarray(coef, dtype=np.float64)
    cut = None if cutoffs is None else np.asarray(cutoffs, dtype=np.float64)
    out = np.zeros(g.shape, dtype=np.float64)
    n = a.size
    if n == 0:
        return out
    step = max(1, _CHUNK_CELLS // max(1, g.size))
    for start in range(0, n, step):
        stop = start + step
        a_blk = a[start:stop]
        block = np.zeros((g.size, a_blk.size), dtype=np.float64)
        for img in images:
            block += gaussian(g[:, None] - img[None, start:stop], omega)
        if cut is not None:
            block[g[:, None] > cut[None, start:stop]] = 0.0
        out += block @ a_blk
    return out


def mixture_slope(
    grid: ArrayLike,
    images: list[FloatArray],
    omega: float,
) -> FloatArray:
    """d/dx of each point's (unnormalized) kernel sum, shape (grid, centers)."""
    g = np.asarray(grid, dtype=np.float64)
    out = np.zeros((g.size, images[0].size), dtype=np.float64)
    for img in images:
        d = g[:, None] - img[None, :]
        out -= d / (omega * omega) * gaussian(d, omega)
    return out
