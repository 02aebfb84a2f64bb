"""Heat-bath Markov chain for discrete area-tilted path ensembles.

One elementary move draws a column k, a path index i, and a uniform U.  At
an interior column the height W_i(k) is resampled conditionally on its
neighbours: nothing happens unless W_i(k-1) = W_i(k+1) = w, in which case
w+1 is proposed with probability interior_prob(rho_i(k/N), N) and w-1
otherwise; proposals violating interlacing, floor, or ceiling are rejected.
At the two end columns (free/potential boundaries only) the endpoint is
resampled to neighbour +- 1 by the same rule with the boundary-potential
gradient folded into the exponent.

Every move preserves the per-path parity class (W_i(k) + k) mod 2, so a
single chain explores one parity sector; the initial configuration selects
the sector.  minimal_config/maximal_config use a fixed per-spec parity
convention so that sandwich and coupling runs compare like with like.

Randomness is drawn in blocks (k-array, i-array, u-array, in that order) of
a size fixed by the run schedule, so outputs are a deterministic function of
(spec, seed, stream_id, schedule).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import _kernels
from .ensemble import CEILING_INF, DiscretePathEnsemble, PathEnsemble, TiltedEnsembleSpec
from .errors import (
    ConfigError,
    CouplingBrokenError,
    DomainError,
    InfeasibleError,
    InvalidStateError,
)

# One RNG block covers at most this many elementary moves; snapshot-aligned
# chunks are rounded to whole snapshot intervals below this size.
CHUNK_TARGET = 1 << 21

_EMPTY_SNAPS = np.empty((0, 1, 1), dtype=np.int32)


def interior_prob(rho_value, N):
    """Up-move probability e^{-2 rho N^{-3/2}} / (1 + e^{-2 rho N^{-3/2}}).

    Evaluated as expit(-2 rho N^{-3/2}), which cannot overflow for large rho.
    """
    if not rho_value > 0:
        raise DomainError("tilt value must be strictly positive")
    if not N >= 1:
        raise DomainError("lattice resolution N must be >= 1")
    return float(expit(-2.0 * rho_value * float(N) ** -1.5))


def boundary_prob(rho_value, N, grad_potential):
    """Endpoint up-move probability with the potential gradient folded in:

    e^{-(2 rho N^{-3/2} + grad)} / (1 + e^{-(2 rho N^{-3/2} + grad)}),

    where grad = nu((a+1)/sqrt(N)) - nu((a-1)/sqrt(N)) is supplied by the
    caller (a is the neighbour height; zero for free endpoints).
    """
    if not rho_value > 0:
        raise DomainError("tilt value must be strictly positive")
    if not N >= 1:
        raise DomainError("lattice resolution N must be >= 1")
    return float(expit(-(2.0 * rho_value * float(N) ** -1.5 + float(grad_potential))))


class RngStream:
    """Counter-based random stream (Philox) keyed by (seed, stream_id).

    The same key always yields the same draw sequence; distinct stream_ids
    give statistically independent streams, so replicas may share one master
    seed.
    """

    __slots__ = ("seed", "stream_id", "_gen")

    def __init__(self, seed, stream_id=0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream_id = int(stream_id) & 0xFFFFFFFFFFFFFFFF
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def integers(self, low, high, size=None):
        return self._gen.integers(low, high, size=size, dtype=np.int64)

    def random(self, size=None):
        return self._gen.random(size=size)

    @property
    def counter(self):
        state = self._gen.bit_generator.state["state"]
        return tuple(int(v) for v in state["counter"])

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


class HeatBathKernel:
    """Precomputed update tables for one spec.

    Interior up-move probabilities p_int[path, column]; boundary tables
    q_lo/q_hi[path, neighbour_height] for free/potential boundaries (fixed
    boundaries never move their endpoints, so the tables are unused there).
    """

    def __init__(self, spec: TiltedEnsembleSpec, table_height=None):
        self.spec = spec
        n, L, N = spec.n, spec.grid_size, spec.N
        self.fixed = spec.boundary.kind == "fixed"
        self.site_count = L - 2 if self.fixed else L
        self.sweep_steps = n * L
        rho = spec.tilt_table()
        self.p_int = expit(-2.0 * rho * float(N) ** -1.5)
        if np.any(self.p_int <= 0.0) or np.any(self.p_int >= 1.0):
            raise ConfigError(
                "tilt too extreme for this lattice resolution (p underflow)"
            )
        self.floor_lat = spec.lattice_floor()
        self.ceil_lat = spec.lattice_ceiling()
        if self.fixed:
            self.x_lat, self.y_lat = spec.lattice_endpoints()
            self.table_height = 1
            self.q_lo = np.zeros((n, 1))
            self.q_hi = np.zeros((n, 1))
        else:
            self.x_lat = self.y_lat = None
            if table_height is None:
                table_height = default_table_height(spec)
            self.table_height = int(table_height)
            self.q_lo = self._boundary_table("left", rho[:, 0])
            self.q_hi = self._boundary_table("right", rho[:, -1])

    def _boundary_table(self, side, rho_end):
        n, N = self.spec.n, self.spec.N
        H = self.table_height
        s = math.sqrt(N)
        a_vals = np.arange(H, dtype=np.int64)
        up = (a_vals + 1) / s
        dn = np.maximum(a_vals - 1, 0) / s
        table = np.empty((n, H))
        for i in range(n):
            fn = self.spec.boundary.potential(side, i)
            if fn is None:
                grad = np.zeros(H)
            else:
                grad = np.array([float(fn(u)) for u in up]) - np.array(
                    [float(fn(d)) for d in dn]
                )
            table[i] = expit(-(2.0 * rho_end[i] * float(N) ** -1.5 + grad))
        return table

    def draw_block(self, rng: RngStream, size):
        """Draw one block of (site, path, uniform) triples, in that order."""
        k = rng.integers(0, self.site_count, size)
        i = rng.integers(0, self.spec.n, size)
        u = rng.random(size)
        return k, i, u


def default_table_height(spec):
    """Boundary-table height: far above any height the endpoint can reach
    under the tilt (overflow is treated as an error, not resized)."""
    base = 2 * spec.n + int(np.max(spec.lattice_floor()))
    return base + int((16 + 4 * spec.n) * math.sqrt(spec.N)) + 256


@dataclass
class ChainState:
    """A running chain: current configuration, its RNG, and step bookkeeping."""

    ens: DiscretePathEnsemble
    rng: RngStream
    step_count: int = 0
    counts: np.ndarray = field(default_factory=lambda: np.zeros(3, dtype=np.int64))


def step(state: ChainState, kernel: HeatBathKernel) -> ChainState:
    """One elementary heat-bath update (mutates state in place, returns it)."""
    k, i, u = kernel.draw_block(state.rng, 1)
    code, _ = _kernels.run_block(
        state.ens.W, kernel.floor_lat, kernel.ceil_lat, kernel.p_int,
        kernel.q_lo, kernel.q_hi, kernel.fixed, k, i, u,
        state.counts, 0, _EMPTY_SNAPS, 0,
    )
    if code == 1:
        raise RuntimeError(
            "boundary table exhausted: endpoint height reached "
            f"{kernel.table_height} lattice units (pass a larger table_height)"
        )
    state.step_count += 1
    return state


# ---------------------------------------------------------------------------
# Extremal configurations
# ---------------------------------------------------------------------------


def _parity_classes(spec):
    """Per-path parity classes (W_i(column 0) mod 2) used by the extremal
    configurations.  Fixed boundaries dictate them; otherwise the bottom path
    hugs the floor at the centre column and classes alternate upward."""
    if spec.boundary.kind == "fixed":
        x, _ = spec.lattice_endpoints()
        return (x % 2).astype(np.int64)
    center = spec.t_lattice
    q = np.empty(spec.n, dtype=np.int64)
    q[-1] = (int(spec.lattice_floor()[center]) + center) % 2
    for i in range(spec.n - 2, -1, -1):
        q[i] = (q[i + 1] + 1) % 2
    return q


def _min_path(env, q, x=None, y=None):
    """Pointwise-least +-1 path with parity class q lying >= env (and hitting
    endpoints x, y when given)."""
    L = len(env)
    cols = np.arange(L, dtype=np.int64)
    m = env + ((env + cols + q) % 2)
    if x is not None:
        m = np.maximum(m, x - cols)
        m = np.maximum(m, y - (L - 1 - cols))
    for j in range(1, L):
        if m[j] < m[j - 1] - 1:
            m[j] = m[j - 1] - 1
    for j in range(L - 2, -1, -1):
        if m[j] < m[j + 1] - 1:
            m[j] = m[j + 1] - 1
    if x is not None and (m[0] != x or m[-1] != y):
        raise InfeasibleError("fixed endpoints unreachable above the envelope")
    return m

def _max_path(env, q, x=None, y=None):
    """Pointwise-greatest +-1 path with parity class q lying <= env."""
    L = len(env)
    cols = np.arange(L, dtype=np.int64)
    M = env - ((env + cols + q) % 2)
    if x is not None:
        M = np.minimum(M, x + cols)
        M = np.minimum(M, y + (L - 1 - cols))
    for j in range(1, L):
        if M[j] > M[j - 1] + 1:
            M[j] = M[j - 1] + 1
    for j in range(L - 2, -1, -1):
        if M[j] > M[j + 1] + 1:
            M[j] = M[j + 1] + 1
    if x is not None and (M[0] != x or M[-1] != y):
        raise InfeasibleError("fixed endpoints unreachable below the envelope")
    return M


def minimal_config(spec) -> DiscretePathEnsemble:
    """Pointwise-least admissible configuration (greedy relaxation to the
    floor, bottom path first)."""
    floor_lat = spec.lattice_floor()
    ceil_lat = spec.lattice_ceiling()
    q = _parity_classes(spec)
    fixed = spec.boundary.kind == "fixed"
    x = y = None
    if fixed:
        x, y = spec.lattice_endpoints()
    W = np.empty((spec.n, spec.grid_size), dtype=np.int64)
    for i in range(spec.n - 1, -1, -1):
        env = floor_lat if i == spec.n - 1 else W[i + 1] + 1
        W[i] = _min_path(env, q[i], x[i] if fixed else None, y[i] if fixed else None)
    if np.any(W[0] > ceil_lat):
        raise InfeasibleError("least admissible configuration exceeds the ceiling")
    return DiscretePathEnsemble(W, spec.N, floor_lat=floor_lat, ceil_lat=ceil_lat)


def maximal_config(spec, cap=None) -> DiscretePathEnsemble:
    """Pointwise-greatest admissible configuration (relaxation against the
    ceiling, top path first).

    With a free/potential boundary and no ceiling there is no greatest
    element, so a height cap (lattice units) bounds the construction; the
    default sits far above the diffusive scale.
    """
    floor_lat = spec.lattice_floor()
    ceil_lat = spec.lattice_ceiling()
    q = _parity_classes(spec)
    fixed = spec.boundary.kind == "fixed"
    x = y = None
    if fixed:
        x, y = spec.lattice_endpoints()
    elif cap is None and np.any(ceil_lat >= CEILING_INF):
        cap = default_height_cap(spec)
    top_env = ceil_lat if cap is None else np.minimum(ceil_lat, np.int64(cap))
    W = np.empty((spec.n, spec.grid_size), dtype=np.int64)
    for i in range(spec.n):
        env = top_env if i == 0 else W[i - 1] - 1
        W[i] = _max_path(env, q[i], x[i] if fixed else None, y[i] if fixed else None)
    if np.any(W[-1] < floor_lat):
        raise InfeasibleError(
            "greatest admissible configuration dips below the floor "
            "(constraint set empty, or the height cap is too low)"
        )
    return DiscretePathEnsemble(W, spec.N, floor_lat=floor_lat, ceil_lat=ceil_lat)


def default_height_cap(spec):
    """Default lattice-unit cap for maximal_config: room for the n paths plus
    ~3 diffusive standard deviations plus fixed headroom."""
    base = 2 * spec.n + int(np.max(spec.lattice_floor()))
    return base + int(4 * math.sqrt(spec.t_lattice)) + 20


# ---------------------------------------------------------------------------
# Single-chain driver
# ---------------------------------------------------------------------------


class ChainSamples:
    """Thinned snapshots from one chain, stored as int32 lattice heights.

    Indexing yields rescaled PathEnsemble views; vector accessors return
    whole statistics at once.
    """

    def __init__(self, spec, W_snaps, seed, stream_id, schedule, counts, final_W):
        self.spec = spec
        self.W_snaps = W_snaps
        self.seed = seed
        self.stream_id = stream_id
        self.schedule = dict(schedule)
        self.counts = counts
        self.final_W = final_W
        self._scale = math.sqrt(spec.N)
        self._times = spec.times()

    def __len__(self):
        return self.W_snaps.shape[0]

    def __getitem__(self, j) -> PathEnsemble:
        return PathEnsemble(self._times, self.W_snaps[j] / self._scale, validate=False)

    def __iter__(self):
        for j in range(len(self)):
            yield self[j]

    @property
    def times(self):
        return self._times

    def marginal_at_zero(self, i=0):
        """Rescaled heights X_{i+1}(0) across snapshots."""
        center = self.spec.t_lattice
        return self.W_snaps[:, i, center] / self._scale

    def top_at_zero(self):
        return self.marginal_at_zero(0)

    def path_matrix(self, i=0):
        """(samples, grid) float matrix of rescaled path i."""
        return self.W_snaps[:, i, :] / self._scale

    def acceptance_summary(self):
        total = int(self.counts.sum())
        return {
            "accepted": int(self.counts[0]),
            "rejected": int(self.counts[1]),
            "frozen": int(self.counts[2]),
            "total": total,
        }


def run_chain(spec, n_steps, burn_in=200, thin=1, seed=0, stream_id=0,
              start=None, table_height=None) -> ChainSamples:
    """Run the heat-bath chain and collect thinned snapshots.

    n_steps, burn_in, thin are in sweeps; one sweep = n*(2*T_N+1) elementary
    moves regardless of boundary kind.  Snapshots are taken at sweeps
    burn_in + thin, burn_in + 2*thin, ...; the chain runs exactly
    burn_in + floor((n_steps-burn_in)/thin)*thin sweeps.  The default start
    is minimal_config(spec).  Output is a deterministic function of
    (spec, seed, stream_id, schedule).
    """
    if not (isinstance(n_steps, (int, np.integer)) and isinstance(burn_in, (int, np.integer))):
        raise ConfigError("n_steps and burn_in must be integers (sweeps)")
    if not (n_steps > burn_in >= 0):
        raise ConfigError("need n_steps > burn_in >= 0")
    if not thin >= 1:
        raise ConfigError("thin must be >= 1")
    kernel = HeatBathKernel(spec, table_height=table_height)
    if start is None:
        start = minimal_config(spec)
    else:
        _validate_start(start, spec, kernel)
    W = start.W.astype(np.int64, copy=True)
    rng = RngStream(seed, stream_id)
    counts = np.zeros(3, dtype=np.int64)
    sweep = kernel.sweep_steps
    n_snaps = (int(n_steps) - int(burn_in)) // int(thin)
    snaps = np.empty((n_snaps, spec.n, spec.grid_size), dtype=np.int32)

    _drive_plain(kernel, W, rng, int(burn_in) * sweep, counts)

    interval = int(thin) * sweep
    group = max(1, CHUNK_TARGET // interval)
    done = 0
    while done < n_snaps:
        g = min(group, n_snaps - done)
        k, i, u = kernel.draw_block(rng, g * interval)
        code, j = _kernels.run_block(
            W, kernel.floor_lat, kernel.ceil_lat, kernel.p_int,
            kernel.q_lo, kernel.q_hi, kernel.fixed, k, i, u,
            counts, interval, snaps, done,
        )
        if code == 1:
            raise RuntimeError(
                "boundary table exhausted during sampling (raise table_height)"
            )
        done += g

    schedule = {
        "n_steps": int(n_steps),
        "burn_in": int(burn_in),
        "thin": int(thin),
        "sweep_steps": sweep,
        "chunk_target": CHUNK_TARGET,
    }
    return ChainSamples(spec, snaps, int(seed), int(stream_id), schedule, counts, W)


def _drive_plain(kernel, W, rng, n_elem, counts):
    """Run n_elem elementary moves with no snapshots, in CHUNK_TARGET blocks."""
    left = int(n_elem)
    while left > 0:
        b = min(left, CHUNK_TARGET)
        k, i, u = kernel.draw_block(rng, b)
        code, _ = _kernels.run_block(
            W, kernel.floor_lat, kernel.ceil_lat, kernel.p_int,
            kernel.q_lo, kernel.q_hi, kernel.fixed, k, i, u,
            counts, 0, _EMPTY_SNAPS, 0,
        )
        if code == 1:
            raise RuntimeError(
                "boundary table exhausted during burn-in (raise table_height)"
            )
        left -= b


def _validate_start(start, spec, kernel):
    if start.n != spec.n or start.W.shape[1] != spec.grid_size:
        raise InvalidStateError("start configuration shape does not match spec")
    start.validate(floor_lat=kernel.floor_lat, ceil_lat=kernel.ceil_lat)
    if kernel.fixed:
        if np.any(start.W[:, 0] != kernel.x_lat) or np.any(start.W[:, -1] != kernel.y_lat):
            raise InvalidStateError("start configuration has wrong fixed endpoints")


# ---------------------------------------------------------------------------
# Coupled chains
# ---------------------------------------------------------------------------


@dataclass
class CouplingState:
    """Two chains driven by one shared stream; lower carries the larger
    tilts / lower floors / lower boundary data, so lower <= upper pointwise
    is preserved by every shared move.  Construct via make_coupling, which
    validates the domination hypotheses and the initial order."""

    lower: ChainState
    upper: ChainState
    shared_rng: RngStream
    kernels: tuple
    step_count: int = 0


def make_coupling(lower_spec, upper_spec, seed, stream_id=0,
                  lower_start=None, upper_start=None) -> CouplingState:
    """Build a validated CouplingState: lower starts at minimal_config of the
    lower spec, upper at maximal_config of the upper spec (overridable)."""
    kl, ku = _ordered_kernels([lower_spec, upper_spec])
    wl = minimal_config(lower_spec) if lower_start is None else lower_start
    wu = maximal_config(upper_spec) if upper_start is None else upper_start
    _validate_start(wl, lower_spec, kl)
    _validate_start(wu, upper_spec, ku)
    _check_stack_order([wl.W, wu.W])
    return CouplingState(
        lower=ChainState(ens=wl, rng=None),
        upper=ChainState(ens=wu, rng=None),
        shared_rng=RngStream(seed, stream_id),
        kernels=(kl, ku),
    )


def coupled_step(cs: CouplingState) -> CouplingState:
    """One shared (k, i, U) update applied to both chains; raises
    CouplingBrokenError if the pathwise order fails at the updated site."""
    kl, ku = cs.kernels
    k, i, u = kl.draw_block(cs.shared_rng, 1)
    for kern, chain in ((kl, cs.lower), (ku, cs.upper)):
        code, _ = _kernels.run_block(
            chain.ens.W, kern.floor_lat, kern.ceil_lat, kern.p_int,
            kern.q_lo, kern.q_hi, kern.fixed, k, i, u,
            chain.counts, 0, _EMPTY_SNAPS, 0,
        )
        if code == 1:
            raise RuntimeError("boundary table exhausted in coupled step")
        chain.step_count += 1
    kk = int(k[0]) + 1 if kl.fixed else int(k[0])
    ii = int(i[0])
    if cs.lower.ens.W[ii, kk] > cs.upper.ens.W[ii, kk]:
        raise CouplingBrokenError(
            f"pathwise order failed at path {ii}, column {kk}, "
            f"step {cs.step_count}",
            lower=cs.lower.ens.W.copy(), upper=cs.upper.ens.W.copy(),
            site=kk, path=ii,
        )
    cs.step_count += 1
    return cs


@dataclass
class OrderedRunResult:
    """Outcome of a bulk shared-randomness run over m order-stacked chains."""

    steps: int
    violations: int
    coalesced_at: int
    final: list
    specs: list


def run_ordered_chains(specs, starts, n_steps, seed, stream_id=0,
                       validate_hypotheses=True) -> OrderedRunResult:
    """Drive m chains (ordered low to high) with shared randomness for
    n_steps elementary moves, checking consecutive pathwise order after
    every move.  Returns violations=0 or raises CouplingBrokenError.

    coalesced_at is the first chunk-end step at which the bottom and top
    chains agree everywhere (-1 if never) — a coupling-time diagnostic.
    """
    specs = list(specs)
    kernels = _ordered_kernels(specs, validate=validate_hypotheses)
    m = len(specs)
    if len(starts) != m:
        raise ConfigError("need one start configuration per spec")
    for w, s, kern in zip(starts, specs, kernels):
        _validate_start(w, s, kern)
    W = np.stack([w.W.astype(np.int64) for w in starts])
    _check_stack_order([W[c] for c in range(m)])
    n, L = specs[0].n, specs[0].grid_size
    floor = np.stack([k.floor_lat for k in kernels])
    ceil = np.stack([k.ceil_lat for k in kernels])
    p_int = np.stack([k.p_int for k in kernels])
    q_lo = np.stack([k.q_lo for k in kernels])
    q_hi = np.stack([k.q_hi for k in kernels])
    fixed = kernels[0].fixed
    rng = RngStream(seed, stream_id)
    coalesced_at = -1
    base = 0
    left = int(n_steps)
    while left > 0:
        b = min(left, CHUNK_TARGET)
        k, i, u = kernels[0].draw_block(rng, b)
        code, j = _kernels.run_block_multi(
            W, floor, ceil, p_int, q_lo, q_hi, fixed, k, i, u
        )
        if code == 1:
            raise RuntimeError("boundary table exhausted in coupled run")
        if code == 2:
            kk = int(k[j]) + 1 if fixed else int(k[j])
            raise CouplingBrokenError(
                f"pathwise order failed at path {int(i[j])}, column {kk}, "
                f"step {base + int(j)}",
                lower=W[0].copy(), upper=W[-1].copy(), site=kk, path=int(i[j]),
            )
        base += b
        left -= b
        if coalesced_at < 0 and np.array_equal(W[0], W[-1]):
            coalesced_at = base
    final = [DiscretePathEnsemble(W[c], specs[c].N, validate=False) for c in range(m)]
    return OrderedRunResult(
        steps=int(n_steps), violations=0, coalesced_at=coalesced_at,
        final=final, specs=specs,
    )


def run_coupled(lower_spec, upper_spec, n_steps, seed, stream_id=0) -> OrderedRunResult:
    """Extremal coupled run: lower from minimal_config of the lower spec,
    upper from maximal_config of the upper spec."""
    starts = [minimal_config(lower_spec), maximal_config(upper_spec)]
    return run_ordered_chains(
        [lower_spec, upper_spec], starts, n_steps, seed, stream_id
    )


def _ordered_kernels(specs, validate=True):
    """Build kernels on a common table height and check the stochastic-
    domination hypotheses between consecutive specs (lower first): equal
    lattice/path layout and boundary kind; entrywise p and q-table order
    (i.e. tilt/potential order); floor, ceiling, and endpoint order with
    matching endpoint parities."""
    ref = specs[0]
    for s in specs[1:]:
        if (s.n, s.grid_size, s.N) != (ref.n, ref.grid_size, ref.N):
            raise ConfigError("coupled specs must share n, T_N, and N")
        if s.boundary.kind != ref.boundary.kind:
            raise ConfigError("coupled specs must share the boundary kind")
    height = None
    if ref.boundary.kind != "fixed":
        height = max(default_table_height(s) for s in specs)
    kernels = [HeatBathKernel(s, table_height=height) for s in specs]
    if not validate:
        return kernels
    for lo, hi in zip(kernels, kernels[1:]):
        if np.any(lo.p_int > hi.p_int):
            raise ConfigError(
                "domination hypothesis fails: lower spec must have the larger "
                "tilts (pointwise) so its up-move probabilities are smaller"
            )
        if np.any(lo.q_lo > hi.q_lo) or np.any(lo.q_hi > hi.q_hi):
            raise ConfigError(
                "domination hypothesis fails: boundary tables must be ordered "
                "(lower spec pushes its endpoints down at least as hard)"
            )
        if np.any(lo.floor_lat > hi.floor_lat) or np.any(lo.ceil_lat > hi.ceil_lat):
            raise ConfigError(
                "domination hypothesis fails: floors/ceilings must be ordered"
            )
        if lo.fixed:
            if np.any(lo.x_lat > hi.x_lat) or np.any(lo.y_lat > hi.y_lat):
                raise ConfigError(
                    "domination hypothesis fails: fixed endpoints must be ordered"
                )
            if np.any((lo.x_lat - hi.x_lat) % 2) or np.any((lo.y_lat - hi.y_lat) % 2):
                raise ConfigError(
                    "coupled fixed endpoints must have matching parities"
                )
    return kernels


def _check_stack_order(configs):
    for lo, hi in zip(configs, configs[1:]):
        if np.any((lo - hi) % 2):
            raise ConfigError("coupled start configurations must share parity classes")
        if np.any(lo > hi):
            raise ConfigError("start configurations are not pathwise ordered")
