"""Shared drivers for tests that compare the compiled chain against the
enumeration oracle: spec builders, exact-law bridges, deterministic
single-step probes, and long-run occupation measure comparisons."""

from __future__ import annotations

import numpy as np

import oracles
from areatilt import _kernels
from areatilt import heatbath as hb
from areatilt.ensemble import (BoundaryData, DiscretePathEnsemble,
                               TiltedEnsembleSpec)

CAP_ABOVE = 14


def tiny_spec(n, T, a, lam, N, fixed_xy=None, floor=0.0, ceiling=None,
              potential_slopes=None):
    if fixed_xy is not None:
        bd = BoundaryData.fixed(fixed_xy, fixed_xy)
    elif potential_slopes is not None:
        bd = BoundaryData.linear_potential(potential_slopes)
    else:
        bd = BoundaryData(kind="free")
    kwargs = {}
    if floor != 0.0 or ceiling is not None:
        from areatilt.ensemble import FloorCeiling
        kwargs["profiles"] = FloorCeiling(floor=floor, ceiling=ceiling)
    return TiltedEnsembleSpec(n=n, T=T, a=a, lam=lam, N=N, boundary=bd,
                              **kwargs)


def enumerated_law(spec, cap_above=CAP_ABOVE):
    """Exhaustive configurations and exact stationary law for a tiny spec.

    The tilts and inverse temperature are recomputed from the raw spec
    parameters here, independently of the package's tables.
    """
    kernel = hb.HeatBathKernel(spec)
    floor_lat = [int(v) for v in kernel.floor_lat]
    cap = max(floor_lat) + cap_above
    fixed = spec.boundary.kind == "fixed"
    fx = tuple(int(v) for v in kernel.x_lat) if fixed else None
    fy = tuple(int(v) for v in kernel.y_lat) if fixed else None
    rhos = [spec.a * spec.lam ** i for i in range(spec.n)]
    kappa = spec.N ** -1.5
    configs = oracles.enumerate_configs(spec.n, spec.grid_size, floor_lat,
                                        cap, fx, fy)
    pi = oracles.boltzmann_law(configs, rhos, kappa)
    return {
        "configs": configs,
        "pi": pi,
        "floor_lat": floor_lat,
        "cap": cap,
        "rhos": rhos,
        "kappa": kappa,
        "fixed": fixed,
        "kernel": kernel,
    }


def probe_compiled_kernel(spec, law, states=4, rel_eps=1e-12):
    """Drive the compiled updater one crafted move at a time and compare
    each landing configuration with the transcription of the update rule.

    For every probed state, path, and unfrozen site, the draw variable is
    placed just below and just above the package's own table probability,
    so both branches of every decision are exercised.  Returns the number
    of probes; raises AssertionError on the first mismatch.
    """
    kernel = law["kernel"]
    configs, floor_lat, cap = law["configs"], law["floor_lat"], law["cap"]
    n, L = spec.n, spec.grid_size
    fixed = law["fixed"]
    sites = list(range(1, L - 1) if fixed else range(L))
    rng = np.random.default_rng(0)
    order = np.argsort(law["pi"])[::-1]
    probes = 0
    for s in order[:states]:
        W0 = configs[s]
        for i in range(n):
            for k in sites:
                if 0 < k < L - 1 and W0[i][k - 1] != W0[i][k + 1]:
                    continue
                if k == 0:
                    p = float(kernel.q_lo[i, W0[i][1]])
                elif k == L - 1:
                    p = float(kernel.q_hi[i, W0[i][L - 2]])
                else:
                    p = float(kernel.p_int[i, k])
                for u, up in ((p - rel_eps, True), (p + rel_eps, False)):
                    ref = W0[i][k + 1 if k == 0 else k - 1] + (1 if up else -1)
                    ok = (floor_lat[k] <= ref < cap
                          and (i == 0 or ref < W0[i - 1][k])
                          and (i == n - 1 or ref > W0[i + 1][k]))
                    W2 = [list(r) for r in W0]
                    if ok:
                        W2[i][k] = ref
                    expect = tuple(map(tuple, W2))
                    ens = DiscretePathEnsemble(
                        np.array(W0, dtype=np.int32), spec.N)
                    ka, ia, ua = kernel.draw_block(rng, 1)
                    ka[0] = k - 1 if fixed else k
                    ia[0] = i
                    ua[0] = u
                    counts = np.zeros(3, dtype=np.int64)
                    code, _ = _kernels.run_block(
                        ens.W, kernel.floor_lat, kernel.ceil_lat,
                        kernel.p_int, kernel.q_lo, kernel.q_hi, kernel.fixed,
                        ka, ia, ua, counts, 0, hb._EMPTY_SNAPS, 0)
                    assert code == 0
                    got = tuple(map(tuple, ens.W.tolist()))
                    assert got == expect, (s, i, k, up, got, expect)
                    probes += 1
    return probes


def occupation_tv(spec, law, sweeps, burn_in, seed, stream_id=3):
    """Total-variation distance between the chain's occupation measure over
    `sweeps` consecutive sweeps and the exact enumerated law.  Also returns
    the empirical mass on configurations outside the enumeration (which
    should be zero when the cap is generous)."""
    smp = hb.run_chain(spec, burn_in + sweeps, burn_in=burn_in, thin=1,
                       seed=seed, stream_id=stream_id)
    index = {W: s for s, W in enumerate(law["configs"])}
    n, L = spec.n, spec.grid_size
    flat = smp.W_snaps.reshape(smp.W_snaps.shape[0], -1)
    rows, counts = np.unique(flat, axis=0, return_counts=True)
    emp = {}
    for r, c in zip(rows, counts):
        W = tuple(map(tuple, r.reshape(n, L).tolist()))
        emp[W] = c / flat.shape[0]
    unseen = sum(p for W, p in emp.items() if W not in index)
    pi = law["pi"]
    tv = 0.5 * (sum(abs(emp.get(W, 0.0) - pi[s]) for W, s in index.items())
                + unseen)
    return tv, unseen
