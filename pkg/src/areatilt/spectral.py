"""Dirichlet spectral toolkit for the operator (1/2) d^2/dx^2 - a x on (0, inf).

The eigenpairs are kappa_ell(x) = c_ell * Ai(b x - omega_ell) with
b = (2a)^(1/3), omega_ell the magnitudes of the Airy zeros, and eigenvalues
lambda_ell = (a/b) * omega_ell.  The heat kernel has the expansion

    Z_t(x, y) = sum_m exp(-lambda_m t) kappa_m(x) kappa_m(y),

truncated here at L terms with a certified tail bound.  An independent
Crank-Nicolson solver (pde_oracle) provides a route to the same kernel that
shares no code with the series.

Normalization constants are *defined* by quadrature of Ai(bx - omega)^2; the
closed form sqrt(b)/|Ai'(-omega)| exists and is used as a cross-check in the
test suite only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.integrate import quad
from scipy.linalg import cho_solve_banded, cholesky_banded
from scipy.optimize import brentq

from .errors import ConfigError, DimensionError, DomainError, StepSizeError

L_DEFAULT = 40
ZERO_TABLE_MAX = 2048

# Global maximum of |Ai| on the real line (attained near z = -1.0188), as an
# upper bound used in tail certificates.
AI_SUP = 0.5357

_TAIL_TOL = 1e-12


def airy_ai(x):
    """Ai(x) for real |x| <= 1e3."""
    x = float(x)
    if not abs(x) <= 1e3:
        raise DomainError("airy_ai is restricted to |x| <= 1e3")
    return float(special.airy(x)[0])


def airy_ai_prime(x):
    """Ai'(x); same domain as airy_ai."""
    x = float(x)
    if not abs(x) <= 1e3:
        raise DomainError("airy_ai_prime is restricted to |x| <= 1e3")
    return float(special.airy(x)[1])


_zero_cache = np.empty(0)


def airy_zero(ell):
    """Magnitude omega_ell of the (ell+1)-th negative zero of Ai.

    Zeros are precomputed in growing blocks; indices at or beyond
    ZERO_TABLE_MAX raise IndexError.
    """
    global _zero_cache
    ell = int(ell)
    if ell < 0 or ell >= ZERO_TABLE_MAX:
        raise IndexError(f"airy zero index {ell} outside [0, {ZERO_TABLE_MAX})")
    if ell >= len(_zero_cache):
        count = max(64, 2 * (ell + 1))
        _zero_cache = -special.ai_zeros(count)[0]
    return float(_zero_cache[ell])


def _omega_floor(m):
    """Lower bound on omega_m from the leading zero asymptotics; used only
    inside tail certificates (validated against the table in the tests)."""
    return (3.0 * math.pi * (4.0 * m + 3.0) / 8.0) ** (2.0 / 3.0)


def _ai_sq_integral(omega):
    """integral of Ai(z)^2 over (-omega, +inf), truncated where Ai is
    negligible; the integrand oscillates ~omega^{3/2} times."""
    lim = int(200 + 3.0 * omega ** 1.5)
    val, err = quad(lambda z: special.airy(z)[0] ** 2, -omega, 15.0,
                    limit=lim, epsabs=1e-13, epsrel=1e-12)
    if err > 1e-9:
        raise RuntimeError(f"normalization quadrature failed to converge: err={err}")
    return val


def _ai_integral(omega):
    """integral of Ai(z) over (-omega, +inf), truncated on the right."""
    lim = int(200 + 3.0 * omega ** 1.5)
    val, err = quad(lambda z: special.airy(z)[0], -omega, 15.0,
                    limit=lim, epsabs=1e-13, epsrel=1e-12)
    if err > 1e-9:
        raise RuntimeError(f"eigenfunction-integral quadrature failed: err={err}")
    return val


class AirySpectrum:
    """First L eigenpairs of the tilted Dirichlet operator for tilt a."""

    __slots__ = ("a", "b", "L", "omegas", "lambdas", "norms",
                 "_row_integrals", "_t_min")

    def __init__(self, a, b, L, omegas, lambdas, norms):
        self.a = a
        self.b = b
        self.L = L
        self.omegas = omegas
        self.lambdas = lambdas
        self.norms = norms
        self._row_integrals = None
        self._t_min = None

    @classmethod
    def build(cls, a, L=L_DEFAULT, cache=True):
        """Construct the spectrum; builds are cached per (a, L) unless
        cache=False forces a fresh computation."""
        a = float(a)
        if not a > 0:
            raise ConfigError("tilt a must be positive")
        L = int(L)
        if not 1 <= L <= ZERO_TABLE_MAX:
            raise ConfigError(f"truncation order L must be in [1, {ZERO_TABLE_MAX}]")
        key = (a, L)
        if cache and key in _spectrum_cache:
            return _spectrum_cache[key]
        b = (2.0 * a) ** (1.0 / 3.0)
        omegas = np.array([airy_zero(m) for m in range(L)])
        lambdas = (a / b) * omegas
        norms = np.empty(L)
        for m in range(L):
            norms[m] = 1.0 / math.sqrt(_ai_sq_integral(omegas[m]) / b)
        spec = cls(a, b, L, omegas, lambdas, norms)
        if cache:
            _spectrum_cache[key] = spec
        return spec

    @property
    def kappa_sup(self):
        """Upper bound on sup_x |kappa_m(x)| over the table (the extension to
        m >= L rests on |Ai'(-omega_m)| growing with m, checked in tests)."""
        return AI_SUP * float(np.max(self.norms))

    def row_integrals(self):
        """J_m = integral of kappa_m over (0, inf), by quadrature."""
        if self._row_integrals is None:
            vals = np.empty(self.L)
            for m in range(self.L):
                vals[m] = self.norms[m] * _ai_integral(self.omegas[m]) / self.b
            self._row_integrals = vals
        return self._row_integrals

    def t_min(self, tol=_TAIL_TOL):
        """Smallest time at which the truncated series carries a certified
        tail below tol; series evaluations refuse smaller times."""
        if self._t_min is None:
            f = lambda t: certified_tail(self, t) - tol
            lo, hi = 1e-5, 1e4
            if f(lo) <= 0:
                self._t_min = lo
            else:
                self._t_min = float(brentq(f, lo, hi, xtol=1e-6))
        return self._t_min

    def __repr__(self):
        return f"AirySpectrum(a={self.a}, L={self.L})"


_spectrum_cache = {}


def eigenfunction(spec: AirySpectrum, ell, x):
    """kappa_ell(x) = c_ell * Ai(b x - omega_ell); exactly 0 at x = 0.

    Accepts scalar or array x >= 0.
    """
    ell = int(ell)
    if ell < 0 or ell >= spec.L:
        raise IndexError(f"eigenfunction index {ell} outside the built table")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise DomainError("eigenfunctions are defined on x >= 0")
    vals = spec.norms[ell] * special.airy(spec.b * arr - spec.omegas[ell])[0]
    vals = np.where(arr == 0.0, 0.0, vals)
    if np.isscalar(x) or arr.ndim == 0:
        return float(vals)
    return vals


@dataclass(frozen=True)
class KernelEvaluation:
    """A truncated-series value together with a certified bound on the
    dropped tail."""

    value: float
    truncation_bound: float


def certified_tail(spec: AirySpectrum, t):
    """Upper bound on the dropped tail sum_{m >= L} e^{-lambda_m t} kappa^2.

    Uses lambda_m >= (a/b) * omega_floor(m) and an integral comparison:
    tail <= kappa_sup^2 * [e^{-beta w} + Gamma(3/2) Q(3/2, beta w) /
    (pi beta^{3/2})], with beta = (a/b) t and w = omega_floor(L).
    """
    if not t > 0:
        raise DomainError("t must be positive")
    beta = (spec.a / spec.b) * float(t)
    w = _omega_floor(spec.L)
    ksq = spec.kappa_sup ** 2
    head = math.exp(-beta * w)
    integral = (special.gamma(1.5) * special.gammaincc(1.5, beta * w)
                / (math.pi * beta ** 1.5))
    return ksq * (head + integral)


def _require_series_time(spec, t):
    tmin = spec.t_min()
    if t < tmin:
        raise DomainError(
            f"t = {t} is below the certified series range t >= {tmin:.4g} for "
            f"L = {spec.L}; build a larger spectrum or use pde_oracle instead"
        )


def heat_kernel(spec: AirySpectrum, t, x, y) -> KernelEvaluation:
    """Z_t(x, y) = sum_m e^{-lambda_m t} kappa_m(x) kappa_m(y), truncated at
    the table size with a certified tail bound; symmetric in (x, y)."""
    t = float(t)
    x = float(x)
    y = float(y)
    if x < 0 or y < 0:
        raise DomainError("heat kernel arguments must satisfy x, y >= 0")
    _require_series_time(spec, t)
    kx = spec.norms * special.airy(spec.b * x - spec.omegas)[0]
    ky = spec.norms * special.airy(spec.b * y - spec.omegas)[0]
    if x == 0.0:
        kx = np.zeros_like(kx)
    if y == 0.0:
        ky = np.zeros_like(ky)
    terms = np.exp(-spec.lambdas * t) * kx * ky
    return KernelEvaluation(value=float(terms.sum()),
                            truncation_bound=certified_tail(spec, t))


def kernel_row_integral(spec: AirySpectrum, t, x):
    """integral over y of Z_t(x, y) = sum_m e^{-lambda_m t} kappa_m(x) J_m,
    with J_m the quadrature eigenfunction integrals."""
    t = float(t)
    x = float(x)
    if x < 0:
        raise DomainError("x must be >= 0")
    _require_series_time(spec, t)
    kx = spec.norms * special.airy(spec.b * x - spec.omegas)[0]
    if x == 0.0:
        kx = np.zeros_like(kx)
    return float(np.sum(np.exp(-spec.lambdas * t) * kx * spec.row_integrals()))


def total_partition(spec: AirySpectrum, T):
    """Free partition function on [-T, T]: the double integral of Z_{2T},
    which the expansion turns into sum_m e^{-2 lambda_m T} J_m^2 with the
    J_m computed by quadrature."""
    T = float(T)
    if not 2.0 * T >= 3.0 * spec.t_min():
        raise DomainError(
            f"T = {T} too small for the certified series (need 2T >= "
            f"{1.5 * spec.t_min():.4g})"
        )
    J = spec.row_integrals()
    return float(np.sum(np.exp(-2.0 * spec.lambdas * T) * J ** 2))


def partition_asymptotic(spec: AirySpectrum, T):
    """Leading large-T prediction e^{-2 lambda_0 T} (integral of kappa_0)^2."""
    J0 = spec.row_integrals()[0]
    return float(math.exp(-2.0 * spec.lambdas[0] * float(T)) * J0 ** 2)


# ---------------------------------------------------------------------------
# Independent PDE route to the kernel
# ---------------------------------------------------------------------------


def pde_oracle(a, t, x_grid, y0, dt=None):
    """Solve d_t u = (1/2) d_xx u - a x u from a lattice delta at y0.

    x_grid must be uniform with x_grid[0] = 0; the boundary is Dirichlet at 0
    and absorbing at the right end.  Time stepping is Crank-Nicolson with
    four backward-Euler half-steps first (smoothing the delta start so the
    second-order scheme is not polluted by ringing).  t may be a scalar or an
    increasing sequence of output times; rows of the result correspond to
    the requested times, approximating Z_t(., y0).
    """
    a = float(a)
    if not a > 0:
        raise ConfigError("tilt a must be positive")
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or len(x) < 8:
        raise DimensionError("x_grid must be a 1-d grid with >= 8 nodes")
    dx = x[1] - x[0]
    if abs(x[0]) > 1e-12 or np.max(np.abs(np.diff(x) - dx)) > 1e-9 * dx:
        raise StepSizeError("x_grid must be uniform and start at 0")
    scalar_t = np.isscalar(t)
    targets = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(targets <= 0) or np.any(np.diff(targets) <= 0):
        raise StepSizeError("output times must be positive and increasing")
    if dt is None:
        dt = min(6.25e-4, targets[0] / 16.0)
    dt = float(dt)
    if not 0 < dt <= targets[0] / 2.0:
        raise StepSizeError("dt must satisfy 0 < dt <= t_first/2")
    # every output time must sit on the step grid
    steps = np.rint(targets / dt).astype(np.int64)
    if np.max(np.abs(steps * dt - targets)) > 1e-9 * max(1.0, targets[-1]):
        raise StepSizeError("each output time must be an integer multiple of dt")

    j0 = int(round(float(y0) / dx))
    if not 0 < j0 < len(x) - 1:
        raise DomainError("y0 must lie strictly inside the grid")

    # interior operator A = (1/2) D2 - a x  (Dirichlet rows dropped)
    xi = x[1:-1]
    m = len(xi)
    off = 1.0 / (2.0 * dx * dx)
    diag = -1.0 / (dx * dx) - a * xi

    def lhs_cholesky(step):
        ab = np.zeros((2, m))
        ab[0, 1:] = -0.5 * step * off
        ab[1, :] = 1.0 - 0.5 * step * diag
        return cholesky_banded(ab)

    chol_be = lhs_cholesky(dt)      # backward Euler with step dt/2 uses
    # (I - (dt/2) A), which equals the Crank-Nicolson LHS for step dt.
    u = np.zeros(m)
    u[j0 - 1] = 1.0 / dx

    def apply_a(v):
        out = diag * v
        out[1:] += off * v[:-1]
        out[:-1] += off * v[1:]
        return out

    outputs = np.empty((len(targets), len(x)))
    done = 0
    for idx, n_steps in enumerate(steps):
        if idx == 0:
            if n_steps < 2:
                raise StepSizeError("first output time must allow >= 2 steps")
            for _ in range(4):  # four BE half-steps == time 2*dt
                u = cho_solve_banded((chol_be, False), u)
            done = 2
        for _ in range(int(n_steps) - done):
            rhs = u + 0.5 * dt * apply_a(u)
            u = cho_solve_banded((chol_be, False), rhs)
        done = int(n_steps)
        low = u.min()
        if low < -1e-9 * max(u.max(), 1e-300):
            raise RuntimeError(f"PDE solution lost positivity (min {low:.3e})")
        full = np.zeros(len(x))
        full[1:-1] = np.maximum(u, 0.0)
        outputs[idx] = full
    return outputs[0] if scalar_t else outputs
