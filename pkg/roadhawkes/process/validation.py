# roadhawkes/process/validation.py
"""
Time-rescaling residuals.

Each event time is mapped through the compensator

    Lambda_i = integral over [0, t_i] x [0, X] of lambda

and the gaps z_i = 1 - exp(-(Lambda_i - Lambda_{i-1})) are compared to the
uniform distribution, with a Kolmogorov-Smirnov band on their empirical
CDF and Beta order-statistic bands on the QQ plot. Lambda_0 is 0, the start
of the window. Space is integrated out over the whole road.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import betainc
from scipy.stats import kstwobign

from roadhawkes.errors import InconsistentStateError, ValidationPreconditionError
from roadhawkes.io import write_csv
from roadhawkes.process.catalog import EventCatalog
from roadhawkes.process.model import ModelComponents
from roadhawkes.process.triggering import earlier_within

log = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

Mode = Literal["in_sample", "out_of_sample"]
MODES: tuple[Mode, ...] = ("in_sample", "out_of_sample")

SMALL_SAMPLE = 35
BISECT_TOL = 1e-10


def transform_times(model: ModelComponents, catalog: EventCatalog) -> FloatArray:
    """
    Lambda_i = mu0 C(t_i) S + A sum_{t_j < t_i} G_g(min(t_i - t_j, H)) H_j

    with C the cumulative temporal background, S the spatial total, G_g the
    cumulative of g and H_j the mass of h inside the road below x_j.
    """
    t = catalog.t
    lam = model.mu0 * model.temporal_cumulative(t) * model.spatial_total()
    if model.A == 0.0 or t.size == 0:
        out: FloatArray = lam
        return out

    horizon = model.g.hi
    H = model.h.cumulative(np.minimum(model.h.hi, catalog.x))
    g_full = float(model.g.total())

    # parents more than a horizon back contribute their whole g mass
    before = np.searchsorted(t, t - horizon, side="left")
    prefix = np.concatenate([[0.0], np.cumsum(H)])
    full = g_full * prefix[before]

    # and the rest a partial one
    i, j = earlier_within(t, horizon)
    partial = np.bincount(
        j, weights=model.g.cumulative(t[j] - t[i]) * H[i], minlength=t.size
    )
    out = lam + model.A * (full + partial)
    return out


def to_uniform(Lambda: ArrayLike) -> FloatArray:
    """z_i = 1 - exp(-(Lambda_i - Lambda_{i-1})), with Lambda_0 = 0."""
    L = np.asarray(Lambda, dtype=np.float64)
    inc = np.diff(L, prepend=0.0)
    scale = max(1.0, float(np.max(np.abs(L)))) if L.size else 1.0
    if np.any(inc < -1e-9 * scale):
        k = int(np.argmin(inc))
        raise InconsistentStateError(
            f"transformed times decrease at event {k} by {-float(inc[k])!r}"
        )
    out: FloatArray = -np.expm1(-np.maximum(inc, 0.0))
    return out


def ks_band(n: int, alpha: float = 0.05) -> float:
    """
    Half-width of the KS band at level alpha, c(alpha) / sqrt(n).

    This is the asymptotic Kolmogorov quantile; for n below 35 it is
    slightly too wide and reports carry a small-sample flag.
    """
    if n < 1:
        raise ValidationPreconditionError(f"need n >= 1, got {n}")
    if not 0.0 < alpha < 1.0:
        raise ValidationPreconditionError(f"alpha must lie in (0, 1), got {alpha!r}")
    return float(kstwobign.isf(alpha)) / math.sqrt(n)


def _beta_quantile(a: FloatArray, b: FloatArray, q: float) -> FloatArray:
    """Invert the regularized incomplete beta by bisection, elementwise."""
    lo = np.zeros_like(a)
    hi = np.ones_like(a)
    while True:
        mid = 0.5 * (lo + hi)
        below = betainc(a, b, mid) < q
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if float(np.max(hi - lo)) <= BISECT_TOL:
            out: FloatArray = 0.5 * (lo + hi)
            return out


def qq_bands(n: int, alpha: float = 0.05) -> tuple[FloatArray, FloatArray]:
    """(alpha/2, 1 - alpha/2) quantiles of Beta(k, n + 1 - k) for k = 1..n."""
    if n < 1:
        raise ValidationPreconditionError(f"need n >= 1, got {n}")
    k = np.arange(1, n + 1, dtype=np.float64)
    a, b = k, n + 1.0 - k
    return _beta_quantile(a, b, alpha / 2.0), _beta_quantile(a, b, 1.0 - alpha / 2.0)


def qq_band(n: int, k: int, alpha: float = 0.05) -> tuple[float, float]:
    if not 1 <= k <= n:
        raise ValidationPreconditionError(f"order {k} outside 1..{n}")
    a = np.array([float(k)])
    b = np.array([float(n + 1 - k)])
    lo = _beta_quantile(a, b, alpha / 2.0)
    hi = _beta_quantile(a, b, 1.0 - alpha / 2.0)
    return float(lo[0]), float(hi[0])


def ks_statistic(z: ArrayLike) -> float:
    """sup |F_n(u) - u| for the empirical CDF of z."""
    zs = np.sort(np.asarray(z, dtype=np.float64))
    n = zs.size
    k = np.arange(1, n + 1, dtype=np.float64)
    return float(max(np.max(k / n - zs), np.max(zs - (k - 1) / n)))


@dataclass(frozen=True, eq=False)
class ValidationReport:
    mode: Mode
    Lambda: FloatArray
    increments: FloatArray
    z: FloatArray
    ks: float
    band95: float
    band99: float
    qq_lo: FloatArray
    qq_hi: FloatArray

    @property
    def n(self) -> int:
        return int(self.z.size)

    @property
    def small_sample(self) -> bool:
        return self.n < SMALL_SAMPLE

    @property
    def passed95(self) -> bool:
        return self.ks <= self.band95

    @property
    def passed99(self) -> bool:
        return self.ks <= self.band99

    @property
    def passed(self) -> bool:
        return self.passed95

    @property
    def z_sorted(self) -> FloatArray:
        out: FloatArray = np.sort(self.z)
        return out

    @property
    def qq_inside(self) -> NDArray[np.bool_]:
        zs = self.z_sorted
        out: NDArray[np.bool_] = (zs >= self.qq_lo) & (zs <= self.qq_hi)
        return out

    def cdf_rows(self) -> list[list[float]]:
        zs = self.z_sorted
        emp = np.arange(1, self.n + 1, dtype=np.float64) / self.n
        return [
            [
                z, e,
                max(0.0, z - self.band95), min(1.0, z + self.band95),
                max(0.0, z - self.band99), min(1.0, z + self.band99),
            ]
            for z, e in zip(zs.tolist(), emp.tolist())
        ]

    def qq_rows(self) -> list[list[object]]:
        zs = self.z_sorted
        return [
            [k + 1, float(zs[k]), (k + 1) / (self.n + 1), float(self.qq_lo[k]), float(self.qq_hi[k])]
            for k in range(self.n)
        ]

    def write_csvs(self, out_dir: Path) -> list[Path]:
        out = Path(out_dir)
        cdf = out / "cdf.csv"
        qq = out / "qq.csv"
        comments = [f"mode={self.mode}", f"n={self.n}", f"ks={self.ks!r}"]
        write_csv(cdf, ["z", "empirical", "lo95", "hi95", "lo99", "hi99"], self.cdf_rows(), comments)
        write_csv(qq, ["k", "observed", "expected", "lo", "hi"], self.qq_rows(), comments)
        return [cdf, qq]

    def summary(self) -> str:
        verdict = "pass" if self.passed else "fail"
        small = " (small sample)" if self.small_sample else ""
        return (
            f"{self.mode}: n={self.n} KS={self.ks:.5f} "
            f"band95={self.band95:.5f} band99={self.band99:.5f} -> {verdict}{small}"
        )


def _check_out_of_sample(model: ModelComponents, catalog: EventCatalog) -> None:
    if model.is_enabled("trend"):
        raise ValidationPreconditionError(
            "out-of-sample validation needs a model fitted with the trend disabled"
        )
    md, cd = model.domain, catalog.domain
    if md.X != cd.X or md.spatial_is_ring != cd.spatial_is_ring:
        raise ValidationPreconditionError(
            f"road differs: trained on X={md.X}, validating on X={cd.X}"
        )
    if md.m_d != cd.m_d or md.m_w != cd.m_w:
        raise ValidationPreconditionError("daily or weekly period differs from training")
    train = (md.origin, md.origin + md.T)
    test = (cd.origin, cd.origin + cd.T)
    if test[0] < train[1] and train[0] < test[1]:
        raise ValidationPreconditionError(
            f"validation window [{test[0]}, {test[1]}) overlaps training window "
            f"[{train[0]}, {train[1]})"
        )


def validate(
    model: ModelComponents, catalog: EventCatalog, mode: Mode = "in_sample"
) -> ValidationReport:
    if mode not in MODES:
        raise ValidationPreconditionError(f"unknown mode {mode!r}")
    if len(catalog) == 0:
        raise ValidationPreconditionError("no events to validate")
    if mode == "out_of_sample":
        _check_out_of_sample(model, catalog)
        model = model.reanchored(catalog.domain)

    Lambda = transform_times(model, catalog)
    z = to_uniform(Lambda)
    n = z.size
    lo, hi = qq_bands(n, 0.05)
    report = ValidationReport(
        mode=mode,
        Lambda=Lambda,
        increments=np.diff(Lambda, prepend=0.0),
        z=z,
        ks=ks_statistic(z),
        band95=ks_band(n, 0.05),
        band99=ks_band(n, 0.01),
        qq_lo=lo,
        qq_hi=hi,
    )
    if report.small_sample:
        log.warning("only %d events; the asymptotic KS band is approximate", n)
    log.info("%s", report.summary())
    return report
