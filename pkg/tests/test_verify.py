"""Checks-layer tests: report plumbing, sampling determinism, input
validation, and cheap positive/negative controls for the experiment
functions (full-scale runs live in the acceptance suite)."""

import json

import numpy as np
import pytest

from areatilt.ensemble import TiltedEnsembleSpec
from areatilt.errors import ConfigError
from areatilt.verify import (VerificationReport, check_cascade,
                             check_confinement, check_domination,
                             check_fs_limit, check_scaling, check_spectral,
                             sample_statistics, single_path_growth)


def _tiny(n=1, T=1.0, a=1.0, lam=2.0, N=8, **kw):
    return TiltedEnsembleSpec(n=n, T=T, a=a, lam=lam, N=N, **kw)


# --- report object -----------------------------------------------------------

def _report(**over):
    base = dict(check="demo", statistic=0.5, threshold=1.0, passed=True,
                sample_sizes={"samples": 4}, seeds={"seed": 1},
                specs=[{"n": 1}], details={"x": [1.0, 2.0]},
                wall_seconds=3.25)
    base.update(over)
    return VerificationReport(**base)


def test_canonical_bytes_exclude_wall_time():
    a = _report(wall_seconds=3.25)
    b = _report(wall_seconds=99.0)
    assert a.canonical_bytes() == b.canonical_bytes()
    assert "wall_seconds" in a.to_dict()
    assert "wall_seconds" not in a.to_dict(with_wall=False)
    # canonical form is sorted, compact, and parseable
    doc = json.loads(a.canonical_bytes())
    assert doc["check"] == "demo"
    assert a.canonical_bytes() == json.dumps(
        doc, sort_keys=True, separators=(",", ":")).encode()


def test_canonical_bytes_reject_non_finite():
    bad = _report(statistic=float("inf"))
    with pytest.raises(ValueError):
        bad.canonical_bytes()
    nan = _report(details={"x": float("nan")})
    with pytest.raises(ValueError):
        nan.canonical_bytes()


# --- sampling plumbing -------------------------------------------------------

def test_sample_statistics_reproducible_and_thread_invariant():
    spec = _tiny()
    kw = dict(n_samples=64, thin=10, burn_in=50, seed=5, stream_base=77)
    one = sample_statistics(spec, ("top_zero", "plain_max"), **kw, threads=1)
    two = sample_statistics(spec, ("top_zero", "plain_max"), **kw, threads=2)
    again = sample_statistics(spec, ("top_zero", "plain_max"), **kw, threads=1)
    for key in ("top_zero", "plain_max"):
        assert np.array_equal(one[key], two[key])
        assert np.array_equal(one[key], again[key])
        assert len(one[key]) == 64
    assert np.all(one["plain_max"] >= one["top_zero"] - 1e-12)


def test_replica_count_is_part_of_the_experiment():
    spec = _tiny()
    kw = dict(n_samples=64, thin=10, burn_in=50, seed=5, stream_base=77)
    four = sample_statistics(spec, ("top_zero",), **kw)["top_zero"]
    twox = sample_statistics(spec, ("top_zero",), **kw, replicas=2)["top_zero"]
    assert len(four) == len(twox) == 64
    assert not np.array_equal(four, twox)


def test_unknown_statistic_rejected():
    with pytest.raises(ConfigError):
        sample_statistics(_tiny(), ("sideways_max",), 8, 5, 10, 0, 0)


# --- domination --------------------------------------------------------------

def test_domination_smoke_and_byte_stable():
    lo = _tiny(a=1.0, lam=2.0)
    hi = _tiny(a=0.5, lam=1.0)
    kw = dict(steps=20000, seed=12, cdf_samples=300, thin=80, burn_in=800)
    rep = check_domination(lo, hi, **kw)
    assert rep.passed
    assert rep.details["violations"] == 0
    assert rep.statistic <= rep.threshold == 1.0
    for stat in ("top_zero", "bottom_zero"):
        assert rep.details[f"cdf_onesided_{stat}"] <= rep.details[
            f"cdf_threshold_{stat}"]
    rerun = check_domination(lo, hi, **kw)
    assert rep.canonical_bytes() == rerun.canonical_bytes()


def test_domination_reversed_pair_rejected():
    # hypotheses are validated up front: the more tilted spec must come first
    with pytest.raises(ConfigError):
        check_domination(_tiny(a=0.5, lam=1.0), _tiny(a=1.0, lam=2.0),
                         steps=1000, cdf_samples=10, thin=5, burn_in=20)


# --- stationary-law comparison ----------------------------------------------

def test_fs_limit_controls():
    kw = dict(T=4.0, a=0.5, N=16, samples=400, thin=150, burn_in=5000, seed=11)
    neg = check_fs_limit(**kw, reference_a=16.0)
    assert not neg.passed
    assert neg.statistic > neg.threshold
    assert neg.details["reference_a"] == 16.0
    pos = check_fs_limit(**kw)
    assert pos.passed
    assert pos.details["reference_a"] == 0.5
    # same sampler output feeds both, only the reference law moved
    assert pos.details["sample_mean"] == neg.details["sample_mean"]


# --- parameter validation ----------------------------------------------------

def test_cascade_k_validation():
    for bad_k in (0, 3, -1, 1.5):
        with pytest.raises(ConfigError):
            check_cascade(3, 1.0, 1.0, 2.0, k=bad_k, N=8, samples=8,
                          thin=5, thin_reduced=5, burn_in=10)


def test_scaling_needs_expanding_tilts():
    with pytest.raises(ConfigError):
        check_scaling(1, 1.0, 1.0, 0.5, N=8, samples=8, thin=5, burn_in=10)


def test_confinement_input_validation():
    for bad_alpha in (0.0, 0.5, -0.1):
        with pytest.raises(ConfigError):
            check_confinement(bad_alpha, n_grid=(1,), T_grid=(1.0, 2.0),
                              N=8, samples=8, thin=5, burn_in=10)
    with pytest.raises(ConfigError):
        check_confinement(0.25, n_grid=(1,), T_grid=(2.0,), N=8,
                          samples=8, thin=5, burn_in=10)
    with pytest.raises(ConfigError):
        check_confinement(0.25, n_grid=(), T_grid=(1.0, 2.0), N=8,
                          samples=8, thin=5, burn_in=10)


# --- spectral bundle ---------------------------------------------------------

def test_spectral_without_pde_is_partial_and_fails():
    rep = check_spectral(0.5, use_pde=False)
    assert rep.complete is False
    assert rep.passed is False
    assert rep.details["pde_vs_series_rel"] is None
    # every sub-margin that did run stayed inside budget
    assert rep.statistic <= 1.0
    json.loads(rep.canonical_bytes())


# --- growth sweep ------------------------------------------------------------

def test_single_path_growth_sublinear():
    res = single_path_growth(T_list=(1.0, 2.0, 4.0, 8.0), a=1.0, N=8,
                             samples=300, thin=50, burn_in=500, seed=3)
    assert res["sublinear"] is True
    assert res["linear_slope"] < 0.5 * res["first_secant"]
    means = res["means"]
    assert all(b > a for a, b in zip(means, means[1:]))
