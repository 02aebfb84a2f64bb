import numpy as np
import pytest

import support
from areatilt.ensemble import DiscretePathEnsemble
from areatilt.errors import ConfigError, CouplingBrokenError
from areatilt.heatbath import (HeatBathKernel, coupled_step, make_coupling,
                               maximal_config, minimal_config,
                               run_coupled, run_ordered_chains)


def spec_pair_tilt():
    lower = support.tiny_spec(2, 1.5, 1.0, 2.0, 16)
    upper = support.tiny_spec(2, 1.5, 1.0, 1.0, 16)
    return lower, upper


def test_identical_specs_stay_ordered_and_coalesce():
    spec = support.tiny_spec(1, 1.0, 1.0, 2.0, 4)
    res = run_coupled(spec, spec, 500_000, seed=3)
    assert res.violations == 0
    # coalescence is reported at chunk-end granularity; -1 means never
    assert res.coalesced_at > 0
    assert np.array_equal(res.final[0].W, res.final[1].W)


def test_tilt_ordered_pair_keeps_pathwise_order():
    lower, upper = spec_pair_tilt()
    res = run_coupled(lower, upper, 80_000, seed=5)
    assert res.violations == 0
    kl, ku = HeatBathKernel(lower), HeatBathKernel(upper)
    res.final[0].validate(floor_lat=kl.floor_lat, ceil_lat=kl.ceil_lat)
    res.final[1].validate(floor_lat=ku.floor_lat, ceil_lat=ku.ceil_lat)
    assert np.all(res.final[0].W <= res.final[1].W)


def test_floor_ordered_pair():
    lower = support.tiny_spec(1, 1.0, 1.0, 2.0, 16)
    upper = support.tiny_spec(1, 1.0, 1.0, 2.0, 16, floor=0.5)
    res = run_coupled(lower, upper, 50_000, seed=7)
    assert res.violations == 0


def test_ceiling_and_potential_ordered_pair():
    lower = support.tiny_spec(1, 1.0, 1.0, 2.0, 16, ceiling=2.5,
                              potential_slopes=(1.0,))
    upper = support.tiny_spec(1, 1.0, 1.0, 2.0, 16,
                              potential_slopes=(0.5,))
    res = run_coupled(lower, upper, 50_000, seed=9)
    assert res.violations == 0


def test_fixed_endpoint_ordered_pair():
    lower = support.tiny_spec(2, 1.0, 2.0, 2.0, 16, fixed_xy=(2.0, 1.0))
    upper = support.tiny_spec(2, 1.0, 1.0, 2.0, 16, fixed_xy=(3.0, 2.0))
    res = run_coupled(lower, upper, 50_000, seed=11)
    assert res.violations == 0
    assert np.all(res.final[0].W <= res.final[1].W)


def test_three_stacked_chains():
    specs = [support.tiny_spec(1, 1.0, 4.0, 2.0, 16),
             support.tiny_spec(1, 1.0, 2.0, 2.0, 16),
             support.tiny_spec(1, 1.0, 1.0, 2.0, 16)]
    starts = [minimal_config(specs[0]), minimal_config(specs[1]),
              maximal_config(specs[2])]
    res = run_ordered_chains(specs, starts, 40_000, seed=13)
    assert res.violations == 0
    W = [f.W for f in res.final]
    assert np.all(W[0] <= W[1]) and np.all(W[1] <= W[2])


def test_mismatched_geometry_rejected():
    lower = support.tiny_spec(1, 1.0, 1.0, 2.0, 16)
    with pytest.raises(ConfigError):
        run_coupled(lower, support.tiny_spec(2, 1.0, 1.0, 2.0, 16), 100, seed=1)
    with pytest.raises(ConfigError):
        run_coupled(lower, support.tiny_spec(1, 2.0, 1.0, 2.0, 16), 100, seed=1)
    with pytest.raises(ConfigError):
        run_coupled(lower, support.tiny_spec(1, 1.0, 1.0, 2.0, 8), 100, seed=1)


def test_unordered_tilts_rejected_by_hypothesis_check():
    # reversed roles: the weakly tilted chain is not below the strongly
    # tilted one, and the table comparison refuses to run the pair
    lower = support.tiny_spec(1, 1.0, 0.5, 2.0, 16)
    upper = support.tiny_spec(1, 1.0, 4.0, 2.0, 16)
    with pytest.raises(ConfigError):
        run_coupled(lower, upper, 100, seed=1)


def test_violation_detected_when_hypotheses_are_forced_off():
    # same reversed pair, driven anyway: the shared-randomness order must
    # break, and the run reports where
    lower = support.tiny_spec(1, 1.0, 0.5, 2.0, 8)
    upper = support.tiny_spec(1, 1.0, 8.0, 2.0, 8)
    starts = [minimal_config(lower), maximal_config(upper)]
    with pytest.raises(CouplingBrokenError) as err:
        run_ordered_chains([lower, upper], starts, 200_000, seed=21,
                           validate_hypotheses=False)
    assert err.value.site >= 0
    assert err.value.lower.shape == err.value.upper.shape


def test_stepwise_coupling_interface():
    spec = support.tiny_spec(1, 1.0, 1.0, 2.0, 8)
    cs = make_coupling(spec, spec, seed=17)
    for _ in range(2000):
        cs = coupled_step(cs)
    assert cs.step_count == 2000
    assert np.all(cs.lower.ens.W <= cs.upper.ens.W)
    DiscretePathEnsemble(cs.lower.ens.W, 8).validate()
    DiscretePathEnsemble(cs.upper.ens.W, 8).validate()


def test_coupled_runs_are_reproducible():
    lower, upper = spec_pair_tilt()
    r1 = run_coupled(lower, upper, 20_000, seed=23)
    r2 = run_coupled(lower, upper, 20_000, seed=23)
    assert np.array_equal(r1.final[0].W, r2.final[0].W)
    assert np.array_equal(r1.final[1].W, r2.final[1].W)
    assert r1.coalesced_at == r2.coalesced_at
