"""End-to-end command-line tests, run in process through main(argv).

Covers the output layout (command/config-hash directories), byte
reproducibility of the CSV/canonical-JSON artifacts, exit codes (0 pass,
1 failed checks, 2 config errors), and the argparse surface.
"""

import json

import pytest
import yaml

from areatilt.cli import main

OMEGA_0 = 2.3381074104597670
LAMBDA_0_HALF = 1.1690537052298837
C_0_HALF = 1.4261046287334949

TINY_SPEC = {"n": 1, "T": 1.0, "a": 1.0, "lam": 2.0, "N": 8}


def _cfg(tmp_path, doc, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc), encoding="utf-8")
    return str(path)


def _only_dir(root, command):
    sub = list((root / command).iterdir())
    assert len(sub) == 1
    return sub[0]


# --- sample ------------------------------------------------------------------

def test_sample_writes_reproducible_artifacts(tmp_path, capsys):
    cfg = _cfg(tmp_path, {
        "spec": dict(TINY_SPEC),
        "schedule": {"sweeps": 300, "burn_in": 100, "thin": 10},
        "seeds": {"master": 7},
    })
    assert main(["sample", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    out = _only_dir(tmp_path / "o", "sample")
    csv_bytes = (out / "samples.csv").read_bytes()
    run = json.loads((out / "run.json").read_text())
    assert run["snapshots"] == 20          # (300 - 100) / 10
    assert run["seed"] == 7
    lines = csv_bytes.decode().splitlines()
    assert lines[0] == "snapshot,t,x1"
    assert len(lines) == 1 + 20 * 17       # t in {-1,...,1} at N=8: 17 columns
    assert "wrote 20 snapshots" in capsys.readouterr().out

    assert main(["sample", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    assert (out / "samples.csv").read_bytes() == csv_bytes


def test_sample_seed_override_changes_hash_dir(tmp_path):
    cfg = _cfg(tmp_path, {
        "spec": dict(TINY_SPEC),
        "schedule": {"sweeps": 120, "burn_in": 20, "thin": 10},
        "seeds": {"master": 7},
    })
    root = tmp_path / "o"
    assert main(["sample", "--config", cfg, "--out", str(root)]) == 0
    assert main(["sample", "--config", cfg, "--out", str(root),
                 "--seed", "8"]) == 0
    dirs = sorted(d.name for d in (root / "sample").iterdir())
    assert len(dirs) == 2                  # the seed participates in the hash
    csvs = [(root / "sample" / d / "samples.csv").read_bytes() for d in dirs]
    assert csvs[0] != csvs[1]


# --- verify ------------------------------------------------------------------

def test_verify_passing_check_exits_zero(tmp_path, capsys):
    cfg = _cfg(tmp_path, {
        "seeds": {"master": 12},
        "checks": {"domination": {
            "steps": 2000, "cdf_samples": 200, "thin": 40, "burn_in": 400,
            "pairs": [{"lower": dict(TINY_SPEC),
                       "upper": {"n": 1, "T": 1.0, "a": 0.5, "lam": 1.0,
                                 "N": 8}}],
        }},
    })
    root = tmp_path / "o"
    assert main(["verify", "--config", cfg, "--out", str(root)]) == 0
    stdout = capsys.readouterr().out
    assert "[PASS] domination#0 statistic=" in stdout
    assert "all checks passed" in stdout
    out = _only_dir(root, "verify")
    rows = (out / "checks.csv").read_text().splitlines()
    assert rows[0] == "check,instance,statistic,threshold,passed,complete"
    assert rows[1].startswith("domination,0,") and rows[1].endswith(",1,1")
    reports = json.loads((out / "reports.json").read_text())
    assert reports[0]["check"] == "domination" and reports[0]["passed"]
    canonical = (out / "reports_canonical.json").read_bytes()
    assert main(["verify", "--config", cfg, "--out", str(root)]) == 0
    capsys.readouterr()
    assert (out / "reports_canonical.json").read_bytes() == canonical


def test_verify_failing_check_exits_one(tmp_path, capsys):
    cfg = _cfg(tmp_path, {
        "seeds": {"master": 12},
        "checks": {"spectral": {"use_pde": False}},
    })
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    stdout = capsys.readouterr().out
    assert "[FAIL] spectral#0" in stdout
    assert "[incomplete]" in stdout        # skipped dual route, not a bad stat
    assert "CHECKS FAILED" in stdout
    out = _only_dir(tmp_path / "o", "verify")
    row = (out / "checks.csv").read_text().splitlines()[1]
    assert row.endswith(",0,0")            # failed and marked incomplete


@pytest.mark.parametrize("doc,needle", [
    ({"bogus": 1, "seeds": {"master": 1}}, "unknown config keys"),
    ({"checks": {"domination": {}}}, "seeds.master"),
    ({"seeds": {"master": 1}, "checks": {"osmosis": {}}}, "unknown check"),
    ({"seeds": {"master": 1}, "checks": {"scaling": {"seed": 4}}},
     "set by the CLI"),
    ({"seeds": {"master": 1},
      "checks": {"scaling": {"osmotic_pressure": 3}}},
     "unexpected keyword argument 'osmotic_pressure'"),
    ({"seeds": {"master": 1}, "checks": {"domination": {"pairs": 7}}},
     "non-empty list"),
    ({"seeds": {"master": 1},
      "checks": {"domination": {"pairs": [[dict(TINY_SPEC),
                                           dict(TINY_SPEC)]]}}},
     "exactly 'lower' and 'upper'"),
    ({"command": "sample", "seeds": {"master": 1}}, "was invoked"),
    ({"seeds": 5}, "'seeds' must be a mapping"),
    ({"seeds": {"master": 1}, "checks": "scaling"}, "must map check names"),
])
def test_verify_config_errors_exit_two(tmp_path, capsys, doc, needle):
    cfg = _cfg(tmp_path, doc)
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert err.startswith("config error:")
    assert needle in err


@pytest.mark.parametrize("doc,needle", [
    ({"spec": dict(TINY_SPEC), "seeds": {"master": 1}}, "schedule.sweeps"),
    ({"spec": dict(TINY_SPEC), "seeds": {"master": 1},
      "schedule": {"sweeps": 10, "stride": 2}}, "unknown schedule key"),
    ({"spec": {"n": 0, "T": 1.0, "a": 1.0, "lam": 2.0, "N": 8},
      "seeds": {"master": 1}, "schedule": {"sweeps": 10}}, "n"),
    ({"seeds": {"master": 1}, "schedule": {"sweeps": 10}}, "'spec' block"),
])
def test_sample_config_errors_exit_two(tmp_path, capsys, doc, needle):
    cfg = _cfg(tmp_path, doc)
    assert main(["sample", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert err.startswith("config error:")
    assert needle in err


def test_unreadable_or_invalid_config_file_exits_two(tmp_path, capsys):
    assert main(["verify", "--config", str(tmp_path / "nope.yaml")]) == 2
    err = capsys.readouterr().err
    assert err.startswith("config error: cannot read config file")

    bad = tmp_path / "bad.yaml"
    bad.write_text("spec: [unclosed\n  - {", encoding="utf-8")
    assert main(["verify", "--config", str(bad)]) == 2
    err = capsys.readouterr().err
    assert err.startswith("config error:") and "not valid YAML" in err


# --- airy-table --------------------------------------------------------------

def test_airy_table_values_and_byte_identity(tmp_path, capsys):
    cfg = _cfg(tmp_path, {"airy": {"a": 0.5, "L": 12}})
    root = tmp_path / "o"
    assert main(["airy-table", "--config", cfg, "--out", str(root)]) == 0
    out = _only_dir(root, "airy-table")
    lines = (out / "airy_table.csv").read_text().splitlines()
    assert lines[0] == "ell,omega,lambda,norm"
    assert len(lines) == 13
    ell, omega, lam, norm = lines[1].split(",")
    assert ell == "0"
    assert float(omega) == pytest.approx(OMEGA_0, abs=1e-12)
    assert float(lam) == pytest.approx(LAMBDA_0_HALF, abs=1e-12)
    assert float(norm) == pytest.approx(C_0_HALF, rel=1e-10)
    table = (out / "airy_table.csv").read_bytes()
    meta = (out / "airy.json").read_bytes()
    capsys.readouterr()
    assert main(["airy-table", "--config", cfg, "--out", str(root)]) == 0
    assert (out / "airy_table.csv").read_bytes() == table
    assert (out / "airy.json").read_bytes() == meta


def test_airy_table_requires_tilt(tmp_path, capsys):
    cfg = _cfg(tmp_path, {"airy": {"L": 4}})
    assert main(["airy-table", "--config", cfg,
                 "--out", str(tmp_path / "o")]) == 2
    assert "airy.a" in capsys.readouterr().err


# --- confinement-sweep -------------------------------------------------------

def test_confinement_sweep_writes_grid(tmp_path, capsys):
    cfg = _cfg(tmp_path, {
        "seeds": {"master": 5},
        "sweep": {"alpha": 0.25, "n_grid": [1], "T_grid": [1.0, 2.0],
                  "N": 8, "samples": 1000, "thin": 15, "burn_in": 400},
    })
    root = tmp_path / "o"
    assert main(["confinement-sweep", "--config", cfg, "--out", str(root)]) == 0
    assert "sup growth" in capsys.readouterr().out
    out = _only_dir(root, "confinement-sweep")
    lines = (out / "cells.csv").read_text().splitlines()
    assert lines[0] == "n,T,mean,stderr,tail_slope,drift_flag"
    assert len(lines) == 3
    report = json.loads((out / "report.json").read_text())
    assert report["check"] == "confinement"
    assert len(report["details"]["cells"]) == 2
    canon = (out / "report_canonical.json").read_bytes()
    capsys.readouterr()
    assert main(["confinement-sweep", "--config", cfg, "--out", str(root)]) == 0
    assert (out / "report_canonical.json").read_bytes() == canon


def test_confinement_sweep_rejects_seed_param(tmp_path, capsys):
    cfg = _cfg(tmp_path, {
        "seeds": {"master": 5},
        "sweep": {"alpha": 0.25, "seed": 3},
    })
    assert main(["confinement-sweep", "--config", cfg,
                 "--out", str(tmp_path / "o")]) == 2
    assert "not the sweep block" in capsys.readouterr().err


# --- argparse surface --------------------------------------------------------

def test_threads_flag_must_be_positive(tmp_path, capsys):
    cfg = _cfg(tmp_path, {"airy": {"a": 0.5, "L": 4}})
    with pytest.raises(SystemExit) as exc:
        main(["airy-table", "--config", cfg, "--threads", "0"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_subcommand_required(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    capsys.readouterr()
