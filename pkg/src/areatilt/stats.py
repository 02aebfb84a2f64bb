"""Path statistics and distributional comparison tools.

Covers the curved maximum (the minimal lift of the profile |t|^alpha that
dominates a path), plain maxima, marginals at time zero, empirical CDFs with
Kolmogorov-Smirnov comparisons, exponential tail-slope fits, and the
stationary single-path reference law whose density is the squared ground
state kappa_0^2 of the tilted Dirichlet operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import ConfigError, DimensionError, DomainError
from .spectral import AirySpectrum, eigenfunction


class CurvedProfile:
    """The profile phi(t) = |t|^alpha tabulated on a run grid, 0 < alpha < 1/2."""

    __slots__ = ("alpha", "times", "phi")

    def __init__(self, alpha, times):
        alpha = float(alpha)
        if not 0.0 < alpha < 0.5:
            raise ConfigError("profile exponent alpha must lie in (0, 1/2)")
        self.alpha = alpha
        self.times = np.asarray(times, dtype=float)
        self.phi = np.abs(self.times) ** alpha

    def __len__(self):
        return len(self.times)


class EmpiricalSummary:
    """Sample values with their mean, standard error, and CDF knots."""

    __slots__ = ("values", "count", "mean", "stderr")

    def __init__(self, values):
        values = np.sort(np.asarray(values, dtype=float))
        if values.ndim != 1 or len(values) == 0:
            raise DomainError("need a nonempty 1-d sample")
        self.values = values
        self.count = len(values)
        self.mean = float(values.mean())
        self.stderr = (float(values.std(ddof=1)) / math.sqrt(self.count)
                       if self.count > 1 else 0.0)

    def cdf(self, x):
        """Right-continuous empirical CDF, vectorized."""
        return np.searchsorted(self.values, np.asarray(x, dtype=float),
                               side="right") / self.count

    def quantile(self, q):
        return float(np.quantile(self.values, q))


def curved_max(path, profile: CurvedProfile):
    """max_k [path(t_k) - phi(t_k)]_+, the minimal y >= 0 with
    y + phi >= path on the grid."""
    path = np.asarray(path, dtype=float)
    if path.shape != profile.phi.shape:
        raise DimensionError(
            f"path has shape {path.shape}, profile grid has {profile.phi.shape}"
        )
    return float(max(np.max(path - profile.phi), 0.0))


def plain_max(path):
    """Maximum of the path over grid times."""
    return float(np.max(np.asarray(path, dtype=float)))


def top_marginal(samples) -> EmpiricalSummary:
    """Summary of the top-path height at time 0 across samples.

    Accepts a ChainSamples set or any iterable of PathEnsemble.
    """
    if hasattr(samples, "top_at_zero"):
        vals = samples.top_at_zero()
    else:
        vals = []
        for s in samples:
            center = (s.heights.shape[1] - 1) // 2
            vals.append(s.heights[0, center])
        vals = np.asarray(vals, dtype=float)
    if len(vals) < 2:
        raise DomainError("need at least 2 samples for a marginal summary")
    return EmpiricalSummary(vals)


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov machinery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KsResult:
    """KS comparison outcome; passed = statistic below the level-alpha
    rejection threshold (plus any caller-added allowance)."""

    statistic: float
    threshold: float
    n_a: int
    n_b: int
    level: float
    one_sided: bool

    @property
    def passed(self):
        return self.statistic <= self.threshold


def _ks_coefficient(level, one_sided):
    # two-sided: c = sqrt(-ln(level/2)/2); one-sided: sqrt(-ln(level)/2)
    if one_sided:
        return math.sqrt(-math.log(level) / 2.0)
    return math.sqrt(-math.log(level / 2.0) / 2.0)


def ks_distance(A, B, level=0.01, one_sided=False) -> KsResult:
    """KS comparison of two samples, or of a sample against an analytic CDF.

    Two-sided: sup |F_A - F_B| with the asymptotic two-sample threshold
    c(level) * sqrt((n+m)/(n m)) (or c/sqrt(n) against an analytic CDF).
    One-sided: sup (F_A - F_B)_+, which is ~0 when A stochastically
    dominates B; the threshold uses the one-sided coefficient.
    """
    if not isinstance(A, EmpiricalSummary):
        A = EmpiricalSummary(A)
    coeff = _ks_coefficient(level, one_sided)
    if callable(B):
        ref = np.asarray(B(A.values), dtype=float)
        n = A.count
        hi = np.arange(1, n + 1) / n - ref     # F_A(x_i) - F_B(x_i)
        lo = ref - np.arange(0, n) / n         # F_B(x_i) - F_A(x_i^-)
        stat = float(np.max(hi)) if one_sided else float(max(np.max(hi), np.max(lo)))
        stat = max(stat, 0.0)
        return KsResult(stat, coeff / math.sqrt(n), n, 0, level, one_sided)
    if not isinstance(B, EmpiricalSummary):
        B = EmpiricalSummary(B)
    grid = np.concatenate([A.values, B.values])
    diff = A.cdf(grid) - B.cdf(grid)
    stat = float(np.max(diff)) if one_sided else float(np.max(np.abs(diff)))
    stat = max(stat, 0.0)
    thr = coeff * math.sqrt((A.count + B.count) / (A.count * B.count))
    return KsResult(stat, thr, A.count, B.count, level, one_sided)


# ---------------------------------------------------------------------------
# Stationary single-path reference law
# ---------------------------------------------------------------------------

_fs_cache = {}


def _fs_table(a):
    """Dense cumulative table of the kappa_0^2 density for tilt a."""
    key = float(a)
    if key in _fs_cache:
        return _fs_cache[key]
    spec = AirySpectrum.build(key, L=1)
    x_max = (spec.omegas[0] + 15.0) / spec.b
    grid = np.linspace(0.0, x_max, 16001)
    dens = eigenfunction(spec, 0, grid) ** 2
    # Simpson cumulative integration on the uniform grid (h^4 accurate)
    h = grid[1] - grid[0]
    cdf = np.zeros_like(grid)
    mid = dens[:-2:2] + 4.0 * dens[1:-1:2] + dens[2::2]
    cdf[2::2] = np.cumsum(mid) * h / 3.0
    # odd nodes by local Simpson-3/8-free half-panel (trapezoid + correction)
    cdf[1::2] = cdf[:-1:2] + h * (5.0 * dens[:-1:2] + 8.0 * dens[1::2]
                                  - dens[2::2]) / 12.0
    cdf = np.maximum.accumulate(cdf)  # wash out 1e-16 rounding wiggles
    _fs_cache[key] = (grid, cdf)
    return grid, cdf


def fs_reference_cdf(a, x):
    """CDF of the stationary single-path law for tilt a: the integral of
    kappa_0^2 from 0 to x.  Vectorized in x; values below 0 give 0 and
    beyond the density support give 1 (tail < 1e-30)."""
    grid, cdf = _fs_table(a)
    arr = np.asarray(x, dtype=float)
    out = np.interp(arr, grid, cdf, left=0.0, right=cdf[-1])
    out = np.clip(out, 0.0, 1.0)
    if np.isscalar(x) or arr.ndim == 0:
        return float(out)
    return out


def fs_reference_mean(a):
    """Mean of the kappa_0^2 density (by the same dense-grid Simpson rule)."""
    grid, _ = _fs_table(a)
    spec = AirySpectrum.build(float(a), L=1)
    dens = eigenfunction(spec, 0, grid) ** 2
    return float(simpson(grid * dens, x=grid))


# ---------------------------------------------------------------------------
# Tail slopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailSlopeResult:
    """Least-squares slope of log-survival on the top decile, with the two
    half-window slopes and a drift flag (heavy-tail indicator: the outer
    half-window decays markedly more slowly than the inner one)."""

    slope: float
    slope_inner: float
    slope_outer: float
    drift_flag: bool


def _logsurv_fit(values, q_lo, q_hi):
    n = len(values)
    lo = int(math.floor(q_lo * n))
    hi = int(math.ceil(q_hi * n))
    xs = values[lo:hi]
    surv = 1.0 - np.arange(lo + 1, hi + 1) / n
    keep = surv > 0
    xs, surv = xs[keep], surv[keep]
    if len(xs) < 5 or xs[-1] - xs[0] < 1e-12:
        raise DomainError("tail window too degenerate for a slope fit")
    slope = np.polyfit(xs, np.log(surv), 1)[0]
    return float(slope)


def tail_slope(summary: EmpiricalSummary) -> TailSlopeResult:
    """Exponential-tail diagnostic on the upper 10% of the sample.

    slope is the least-squares slope of log(1 - CDF) over the top decile;
    strictly negative values of magnitude bounded away from 0 are the
    signature of exponential-type tails.  The decile is also split into
    [0.90, 0.95] and [0.95, 1.0] windows: when the outer window's magnitude
    drops below 0.8x the inner one's, the fit is flagged as drifting
    (sub-exponential behaviour).
    """
    if summary.count < 1000:
        raise DomainError("tail_slope needs at least 1000 samples")
    v = summary.values
    if v[-1] - v[0] < 1e-12:
        raise DomainError("degenerate (constant) sample has no tail slope")
    slope = _logsurv_fit(v, 0.90, 1.0)
    inner = _logsurv_fit(v, 0.90, 0.95)
    outer = _logsurv_fit(v, 0.95, 1.0)
    drift = abs(outer) < 0.8 * abs(inner)
    return TailSlopeResult(slope=slope, slope_inner=inner, slope_outer=outer,
                           drift_flag=drift)


def batch_stderr(values, batch_len):
    """Batch-means standard error of the mean for correlated draws: chop the
    series into consecutive batches of batch_len and take the stderr of the
    batch means."""
    values = np.asarray(values, dtype=float)
    batch_len = max(1, int(batch_len))
    nb = len(values) // batch_len
    if nb < 2:
        raise DomainError("need at least 2 full batches")
    means = values[: nb * batch_len].reshape(nb, batch_len).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(nb))


def integrated_autocorr(values, cutoff=0.02):
    """Integrated autocorrelation time of a scalar series, in units of the
    series' own sampling interval.

    Sums 1 + 2 sum_k rho_k with the window closed at the first lag where the
    empirical autocorrelation drops below `cutoff` (initial-positive-window
    style).  Returns at least 1.0; a constant series also returns 1.0.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or len(x) < 8:
        raise DomainError("integrated_autocorr needs a 1-d series, >= 8 points")
    x = x - x.mean()
    var = float(np.mean(x * x))
    if var <= 0.0:
        return 1.0
    tau = 1.0
    for k in range(1, len(x) // 4):
        rho = float(np.mean(x[:-k] * x[k:])) / var
        if rho < cutoff:
            break
        tau += 2.0 * rho
    return max(tau, 1.0)


def effective_count(values, cutoff=0.02):
    """Effective number of independent draws in a correlated series:
    len(values) / integrated_autocorr(values), at least 1."""
    return max(1.0, len(values) / integrated_autocorr(values, cutoff=cutoff))
