"""Area-tilted ensembles of ordered random paths above a hard wall.

An instance is n non-crossing paths X_1 > X_2 > ... > X_n on [-T, T], kept
above a floor (and optionally below a ceiling), reweighted by
exp(-sum_i rho_i * integral of X_i), with geometrically growing tilts
rho_i = a * lambda**(i-1).  The discrete model lives on the lattice
t_k = k/N, k in {-T_N, ..., T_N}, T_N = floor(T*N): integer heights W_i(k)
with |W_i(k+1) - W_i(k)| = 1, 0 <= W_{i+1}(k) < W_i(k), weight
exp(-N**-1.5 * sum_{i,k} rho_i(k/N) * W_i(k)) times boundary factors.
Rescaled paths are X_i(t_k) = W_i(k) / sqrt(N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    DimensionError,
    DomainError,
    InfeasibleError,
    InvalidStateError,
)

# Lattice stand-in for "no ceiling".  Large enough to never bind, small
# enough that +-1 arithmetic cannot overflow int64.
CEILING_INF = np.int64(1) << 40

_FUZZ = 1e-9  # guard against float drift in T*N and sqrt(N)*h rounding


def _as_profile_array(profile, times, default):
    """Evaluate a floor/ceiling profile spec on the grid.

    Accepts None (-> constant default), a scalar, a callable t -> value, or
    an array already tabulated on `times`.
    """
    if profile is None:
        return np.full(len(times), default, dtype=float)
    if np.isscalar(profile):
        return np.full(len(times), float(profile), dtype=float)
    if callable(profile):
        vals = np.asarray([float(profile(t)) for t in times], dtype=float)
        return vals
    vals = np.asarray(profile, dtype=float)
    if vals.shape != (len(times),):
        raise DimensionError(
            f"profile table has length {vals.shape}, grid has {len(times)} points"
        )
    return vals.copy()


@dataclass(frozen=True)
class FloorCeiling:
    """Floor/ceiling profile pair.

    Each profile may be None (floor -> 0, ceiling -> +inf), a constant, a
    callable of continuum time, or an array tabulated on the run grid.
    Floors must be nonnegative; floor < ceiling pointwise where both bind.
    """

    floor: object = None
    ceiling: object = None

    def floor_values(self, times):
        vals = _as_profile_array(self.floor, times, 0.0)
        if np.any(vals < 0):
            raise ConfigError("floor profile must be nonnegative")
        return vals

    def ceiling_values(self, times):
        vals = _as_profile_array(self.ceiling, times, np.inf)
        return vals

    def validate(self, times):
        f = self.floor_values(times)
        c = self.ceiling_values(times)
        if np.any(f >= c):
            raise ConfigError("floor must lie strictly below ceiling on the grid")
        return f, c


@dataclass(frozen=True)
class BoundaryData:
    """Endpoint behaviour of the ensemble.

    kind "free":      endpoints resample like any other site (zero potential).
    kind "fixed":     endpoints pinned to vectors x (left) and y (right),
                      given in continuum units, strictly ordered in the open
                      chamber x_1 > ... > x_n > 0.
    kind "potential": endpoints resample under per-path nondecreasing
                      potentials nu_i (left) and eta_i (right); admissible
                      when exp(-nu_i) is square-integrable (the tilt itself
                      confines, so zero potentials are admissible too).
    """

    kind: str = "free"
    x: tuple = None
    y: tuple = None
    nu: tuple = None
    eta: tuple = None

    @classmethod
    def fixed(cls, x, y):
        return cls(kind="fixed", x=tuple(float(v) for v in x), y=tuple(float(v) for v in y))

    @classmethod
    def linear_potential(cls, nu_slopes, eta_slopes=None):
        """Potentials nu_i(u) = s_i * u (slopes s_i >= 0)."""
        if eta_slopes is None:
            eta_slopes = nu_slopes
        nu = tuple(_LinearPotential(s) for s in nu_slopes)
        eta = tuple(_LinearPotential(s) for s in eta_slopes)
        return cls(kind="potential", nu=nu, eta=eta)

    def validate(self, n):
        if self.kind not in ("free", "fixed", "potential"):
            raise ConfigError(f"unknown boundary kind {self.kind!r}")
        if self.kind == "fixed":
            if self.x is None or self.y is None:
                raise ConfigError("fixed boundary needs endpoint vectors x and y")
            for name, v in (("x", self.x), ("y", self.y)):
                if len(v) != n:
                    raise ConfigError(f"endpoint vector {name} has length {len(v)}, n = {n}")
                arr = np.asarray(v, dtype=float)
                if np.any(np.diff(arr) >= 0) or arr[-1] <= 0:
                    raise ConfigError(
                        f"endpoint vector {name} must satisfy v_1 > ... > v_n > 0"
                    )
        if self.kind == "potential":
            nu = self.nu if self.nu is not None else tuple([None] * n)
            eta = self.eta if self.eta is not None else tuple([None] * n)
            if len(nu) != n or len(eta) != n:
                raise ConfigError("need one potential per path (or None)")
            for fn in list(nu) + list(eta):
                if fn is not None:
                    _check_potential(fn)

    def potential(self, side, i):
        """Potential callable for path i (0-based) on side 'left'/'right'.

        Returns None for a zero potential (free endpoints).
        """
        if self.kind != "potential":
            return None
        fns = self.nu if side == "left" else self.eta
        if fns is None:
            return None
        return fns[i]


class _LinearPotential:
    __slots__ = ("slope",)

    def __init__(self, slope):
        slope = float(slope)
        if slope < 0:
            raise ConfigError("potential slope must be >= 0 (nondecreasing)")
        self.slope = slope

    def __call__(self, u):
        return self.slope * u

    def __eq__(self, other):
        return isinstance(other, _LinearPotential) and other.slope == self.slope

    def __hash__(self):
        return hash(("linear-potential", self.slope))

    def __repr__(self):
        return f"_LinearPotential({self.slope})"


def _check_potential(fn):
    """Cheap numeric screen for 'nondecreasing with square-integrable exp(-nu)'.

    A callable cannot be checked symbolically; probe monotonicity on a grid
    and require enough growth that exp(-2 nu) has integrable tail.  Zero
    potentials pass (the area tilt confines endpoints on its own).
    """
    probes = np.array([0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 200.0])
    vals = np.array([float(fn(u)) for u in probes])
    if np.any(np.diff(vals) < -1e-12):
        raise ConfigError("boundary potential must be nondecreasing")
    if not np.all(np.isfinite(vals)):
        raise ConfigError("boundary potential must be finite on [0, 200]")


@dataclass(frozen=True)
class TiltedEnsembleSpec:
    """Full problem instance: geometry, tilts, constraints, boundary, lattice.

    tilts: optional per-path override of the geometric schedule; each entry a
    positive constant or a callable of continuum time.
    """

    n: int
    T: float
    a: float
    lam: float
    N: int
    boundary: BoundaryData = field(default_factory=BoundaryData)
    profiles: FloorCeiling = field(default_factory=FloorCeiling)
    tilts: tuple = None

    def __post_init__(self):
        self.validate()

    # --- lattice geometry -------------------------------------------------

    @property
    def t_lattice(self):
        """T_N = floor(T*N)."""
        return int(math.floor(self.T * self.N + _FUZZ))

    @property
    def grid_size(self):
        return 2 * self.t_lattice + 1

    def times(self):
        tn = self.t_lattice
        t = np.arange(-tn, tn + 1, dtype=float) / self.N
        t.flags.writeable = False
        return t

    # --- tilts ------------------------------------------------------------

    def tilt_value(self, i, t):
        """rho_i(t) for path index i (0-based: i=0 is the top path)."""
        if self.tilts is not None:
            entry = self.tilts[i]
            return float(entry(t)) if callable(entry) else float(entry)
        return self.a * self.lam**i

    def tilt_table(self):
        """(n, 2T_N+1) array of rho_i(t_k)."""
        times = self.times()
        table = np.empty((self.n, len(times)), dtype=float)
        for i in range(self.n):
            if self.tilts is not None and callable(self.tilts[i]):
                fn = self.tilts[i]
                table[i] = [fn(t) for t in times]
            else:
                table[i] = self.tilt_value(i, 0.0)
        return table

    # --- lattice projections ----------------------------------------------

    def lattice_floor(self):
        """Floor in lattice units, rounded up (conservative)."""
        f = self.profiles.floor_values(self.times())
        return np.ceil(f * math.sqrt(self.N) - _FUZZ).astype(np.int64)

    def lattice_ceiling(self):
        """Ceiling in lattice units, rounded down; +inf -> CEILING_INF."""
        c = self.profiles.ceiling_values(self.times())
        out = np.full(len(c), CEILING_INF, dtype=np.int64)
        finite = np.isfinite(c)
        out[finite] = np.floor(c[finite] * math.sqrt(self.N) + _FUZZ).astype(np.int64)
        return out

    def lattice_endpoints(self):
        """Integer endpoint vectors (x_lat, y_lat) for a fixed boundary.

        Rounds to the lattice, restores strict interlacing bottom-up, then
        parity-matches y to x (2T_N is even, so W(T_N) - W(-T_N) must be
        even).  Raises InfeasibleError if the result is unreachable or
        violates floor/ceiling at the ends.
        """
        if self.boundary.kind != "fixed":
            raise ConfigError("lattice_endpoints only applies to fixed boundaries")
        s = math.sqrt(self.N)
        x = np.rint(np.asarray(self.boundary.x) * s).astype(np.int64)
        y = np.rint(np.asarray(self.boundary.y) * s).astype(np.int64)
        floor_lat = self.lattice_floor()
        ceil_lat = self.lattice_ceiling()
        for v in (x, y):
            v[-1] = max(v[-1], 0)
            for i in range(self.n - 2, -1, -1):
                v[i] = max(v[i], v[i + 1] + 1)
        for i in range(self.n - 1, -1, -1):
            if (x[i] + y[i]) % 2 != 0:
                y[i] += 1
            if i < self.n - 1 and y[i] <= y[i + 1]:
                y[i] = y[i + 1] + 2 - ((x[i] + y[i + 1]) % 2)
        tn = self.t_lattice
        if np.any(np.abs(x - y) > 2 * tn):
            raise InfeasibleError("endpoints unreachable within the time window")
        if x[-1] < floor_lat[0] or y[-1] < floor_lat[-1]:
            raise InfeasibleError("fixed endpoints start below the floor")
        if x[0] > ceil_lat[0] or y[0] > ceil_lat[-1]:
            raise InfeasibleError("fixed endpoints start above the ceiling")
        return x, y

    # --- validation ---------------------------------------------------------

    def validate(self):
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ConfigError("n must be an integer >= 1")
        if not self.T > 0:
            raise ConfigError("T must be positive")
        if not (isinstance(self.N, (int, np.integer)) and self.N >= 1):
            raise ConfigError("N must be a positive integer")
        if self.t_lattice < 1:
            raise ConfigError("T*N must be >= 1 (empty interior)")
        if not self.a > 0:
            raise ConfigError("base tilt a must be positive")
        if not self.lam >= 1:
            raise ConfigError("tilt ratio lambda must be >= 1")
        if self.tilts is not None and len(self.tilts) != self.n:
            raise ConfigError("need one tilt entry per path")
        if np.any(self.tilt_table() <= 0):
            raise ConfigError("all tilt values must be strictly positive on the grid")
        self.profiles.validate(self.times())
        self.boundary.validate(self.n)
        if self.boundary.kind == "fixed":
            self.lattice_endpoints()

    # --- serialization (config-file subset) --------------------------------

    def to_dict(self):
        d = {
            "n": int(self.n),
            "T": float(self.T),
            "a": float(self.a),
            "lambda": float(self.lam),
            "N": int(self.N),
            "boundary": {"kind": self.boundary.kind},
        }
        if self.boundary.kind == "fixed":
            d["boundary"]["x"] = [float(v) for v in self.boundary.x]
            d["boundary"]["y"] = [float(v) for v in self.boundary.y]
        if self.boundary.kind == "potential":
            d["boundary"]["nu_slopes"] = [
                (fn.slope if isinstance(fn, _LinearPotential) else _reject_callable())
                for fn in (self.boundary.nu or ())
            ]
            d["boundary"]["eta_slopes"] = [
                (fn.slope if isinstance(fn, _LinearPotential) else _reject_callable())
                for fn in (self.boundary.eta or ())
            ]
        if self.tilts is not None:
            d["tilts"] = [_serializable_tilt(v) for v in self.tilts]
        if self.profiles.floor is not None:
            d["floor"] = _serializable_profile(self.profiles.floor)
        if self.profiles.ceiling is not None:
            d["ceiling"] = _serializable_profile(self.profiles.ceiling)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        known = {"n", "T", "a", "lam", "lambda", "N", "boundary", "floor",
                 "ceiling", "tilts"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown spec keys: {sorted(unknown)}")
        bd = d.get("boundary", {"kind": "free"})
        kind = bd.get("kind", "free")
        if kind == "fixed":
            boundary = BoundaryData.fixed(bd["x"], bd["y"])
        elif kind == "potential":
            boundary = BoundaryData.linear_potential(
                bd.get("nu_slopes", []), bd.get("eta_slopes")
            )
        elif kind == "free":
            boundary = BoundaryData()
        else:
            raise ConfigError(f"unknown boundary kind {kind!r}")
        profiles = FloorCeiling(floor=d.get("floor"), ceiling=d.get("ceiling"))
        tilts = d.get("tilts")
        return cls(
            n=int(d["n"]),
            T=float(d["T"]),
            a=float(d["a"]),
            lam=float(d.get("lambda", d.get("lam", 1.0))),
            N=int(d["N"]),
            boundary=boundary,
            profiles=profiles,
            tilts=tuple(tilts) if tilts is not None else None,
        )


def _reject_callable():
    raise ConfigError("callable potentials are API-only; configs take linear slopes")


def _serializable_tilt(v):
    if callable(v):
        raise ConfigError("callable tilts are API-only; configs take constants")
    return float(v)


def _serializable_profile(p):
    if callable(p):
        raise ConfigError("callable profiles are API-only; configs take constants/tables")
    if np.isscalar(p):
        return float(p)
    return [float(v) for v in np.asarray(p)]


# ---------------------------------------------------------------------------
# Path containers
# ---------------------------------------------------------------------------


class PathEnsemble:
    """Immutable rescaled sample: times t_k = k/N and an n x (2T_N+1) height
    matrix with X_1 > X_2 > ... > X_n."""

    __slots__ = ("times", "heights")

    def __init__(self, times, heights, validate=True):
        times = np.asarray(times, dtype=float)
        heights = np.atleast_2d(np.asarray(heights, dtype=float))
        if heights.shape[1] != times.shape[0]:
            raise DimensionError(
                f"heights have {heights.shape[1]} columns, grid has {times.shape[0]}"
            )
        times = times.copy()
        heights = heights.copy()
        times.flags.writeable = False
        heights.flags.writeable = False
        self.times = times
        self.heights = heights
        if validate:
            self.validate()

    @property
    def n(self):
        return self.heights.shape[0]

    def validate(self, floor_values=None, ceiling_values=None):
        """Strict interlacing between paths; floor/ceiling non-strict (the
        lattice wall is inclusive: W_n = floor is admissible)."""
        h = self.heights
        if h.shape[0] > 1 and np.any(h[:-1] <= h[1:]):
            raise InvalidStateError("paths must be strictly ordered X_1 > ... > X_n")
        if floor_values is not None and np.any(h[-1] < np.asarray(floor_values) - 1e-12):
            raise InvalidStateError("bottom path dips below the floor")
        if ceiling_values is not None and np.any(h[0] > np.asarray(ceiling_values) + 1e-12):
            raise InvalidStateError("top path exceeds the ceiling")

    def path(self, i):
        return self.heights[i]

    def value_at(self, i, t):
        """Height of path i at continuum time t (must be a grid point)."""
        k = (t - self.times[0]) * (len(self.times) - 1) / (self.times[-1] - self.times[0])
        j = int(round(k))
        if abs(k - j) > 1e-6:
            raise DomainError(f"t = {t} is not a grid time")
        return self.heights[i, j]


class DiscretePathEnsemble:
    """Mutable integer configuration W (n x (2T_N+1)); single-writer."""

    __slots__ = ("W", "N")

    def __init__(self, W, N, validate=True, floor_lat=None, ceil_lat=None):
        self.W = np.atleast_2d(np.asarray(W, dtype=np.int64)).copy()
        self.N = int(N)
        if validate:
            self.validate(floor_lat=floor_lat, ceil_lat=ceil_lat)

    @property
    def n(self):
        return self.W.shape[0]

    @property
    def t_lattice(self):
        return (self.W.shape[1] - 1) // 2

    def parities(self):
        """Per-path parity class: (W_i(k) + k) mod 2, a dynamics invariant.

        Column index 0 is site -T_N; the class is the same whichever site is
        used, which validate() enforces via the +-1 increments.
        """
        return (self.W[:, 0] % 2).astype(np.int64)

    def endpoint_parities(self):
        return np.stack([self.W[:, 0] % 2, self.W[:, -1] % 2], axis=1)

    def validate(self, floor_lat=None, ceil_lat=None):
        W = self.W
        if np.any(np.abs(np.diff(W, axis=1)) != 1):
            raise InvalidStateError("increments must be +-1 at every site")
        if W.shape[0] > 1:
            if np.any(W[:-1] <= W[1:]):
                raise InvalidStateError("paths must satisfy W_{i+1} < W_i")
            if np.any(W[1:] < 0):
                raise InvalidStateError("paths below the top one must be >= 0")
        if floor_lat is not None and np.any(W[-1] < floor_lat):
            raise InvalidStateError("bottom path dips below the lattice floor")
        elif floor_lat is None and np.any(W[-1] < 0):
            raise InvalidStateError("bottom path dips below the wall at 0")
        if ceil_lat is not None and np.any(W[0] > ceil_lat):
            raise InvalidStateError("top path exceeds the lattice ceiling")

    def to_paths(self, validate=False):
        tn = self.t_lattice
        times = np.arange(-tn, tn + 1, dtype=float) / self.N
        return PathEnsemble(times, self.W / math.sqrt(self.N), validate=validate)

    def copy(self):
        return DiscretePathEnsemble(self.W, self.N, validate=False)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def compute_area(path, tilt, N, times=None):
    """Discrete tilted area: (1/N) * sum_k tilt(t_k) * path(t_k).

    `path` is a height sequence on the grid; `tilt` a positive constant,
    callable (needs `times`), or a tabulated array of equal length.  This is
    the Riemann approximation of the area functional, summed over all
    2T_N + 1 grid points.
    """
    path = np.asarray(path, dtype=float)
    if callable(tilt):
        if times is None:
            raise DimensionError("callable tilt needs the time grid")
        tilt = np.asarray([tilt(t) for t in times], dtype=float)
    elif np.isscalar(tilt):
        tilt = np.full(path.shape, float(tilt))
    else:
        tilt = np.asarray(tilt, dtype=float)
    if tilt.shape != path.shape:
        raise DimensionError(
            f"tilt has shape {tilt.shape}, path has shape {path.shape}"
        )
    if np.any(tilt <= 0):
        raise DomainError("tilt must be strictly positive")
    return float(np.dot(tilt, path)) / N


def log_weight(ens, spec):
    """log of the unnormalized stationary weight of a discrete configuration.

    -N^{-3/2} sum_i sum_k rho_i(t_k) W_i(k), minus endpoint potentials for a
    potential boundary.  Diagnostics / small-instance enumeration only.
    """
    if not isinstance(ens, DiscretePathEnsemble):
        raise InvalidStateError("log_weight operates on discrete configurations")
    if ens.n != spec.n or ens.W.shape[1] != spec.grid_size:
        raise DimensionError("configuration shape does not match the spec grid")
    ens.validate(floor_lat=spec.lattice_floor(), ceil_lat=spec.lattice_ceiling())
    if spec.boundary.kind == "fixed":
        x, y = spec.lattice_endpoints()
        if np.any(ens.W[:, 0] != x) or np.any(ens.W[:, -1] != y):
            raise InvalidStateError("configuration endpoints differ from the fixed data")
    rho = spec.tilt_table()
    total = -(spec.N ** -1.5) * float(np.sum(rho * ens.W))
    if spec.boundary.kind == "potential":
        s = math.sqrt(spec.N)
        for i in range(spec.n):
            nu = spec.boundary.potential("left", i)
            eta = spec.boundary.potential("right", i)
            if nu is not None:
                total -= float(nu(ens.W[i, 0] / s))
            if eta is not None:
                total -= float(eta(ens.W[i, -1] / s))
    return total


def rescale_ensemble(sample, gamma):
    """Brownian rescaling X^(gamma)(t) = gamma^{-1/2} X(gamma * t).

    The target grid keeps the same per-unit-time resolution; source values
    at gamma*t_k are taken by index arithmetic when the point lands on the
    source grid and by linear interpolation otherwise (paths are piecewise
    linear by convention).
    """
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    times = sample.times
    span = times[-1]
    step = times[1] - times[0] if len(times) > 1 else 1.0
    target_span = span / gamma
    m = int(math.floor(target_span / step + _FUZZ))
    new_times = np.arange(-m, m + 1, dtype=float) * step
    src = gamma * new_times
    if src[0] < times[0] - _FUZZ or src[-1] > times[-1] + _FUZZ:
        raise ConfigError("rescaled grid needs source values outside the sampled window")
    heights = np.empty((sample.heights.shape[0], len(new_times)))
    for i in range(sample.heights.shape[0]):
        heights[i] = np.interp(src, times, sample.heights[i])
    heights /= math.sqrt(gamma)
    return PathEnsemble(new_times, heights, validate=False)


def shift_ensemble(sample, xi):
    """Subtract a constant xi from every height.

    Pairs with shifting the floor by the same amount; the caller owns the
    floor bookkeeping, so no floor validation happens here.
    """
    return PathEnsemble(sample.times, sample.heights - float(xi), validate=False)
