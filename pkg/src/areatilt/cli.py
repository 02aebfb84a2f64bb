"""Command-line front end.

Four subcommands, all driven by a YAML config (see config.py):

    areatilt sample             -- run one chain, dump snapshots as CSV
    areatilt verify             -- run identity checks, exit 0 iff all pass
    areatilt airy-table         -- eigenvalue/norm table for one tilt
    areatilt confinement-sweep  -- curved-max table over an (n, T) grid

Outputs land in <out-root>/<command>/<config-hash>/ so identical configs
overwrite their own artifacts.  CSV files use comma separators, '.' decimal
points, a header line, and LF line endings; floats are written at full
precision (repr), which makes reruns byte-identical.  Verification reports
are additionally written in a canonical JSON form that excludes wall-clock
times — that file is the byte-reproducibility surface.
"""

from __future__ import annotations

import argparse
import csv
import inspect
import json
import sys
import time
from pathlib import Path

from . import verify as verify_mod
from .config import KNOWN_CHECKS, RunConfig, load_config
from .ensemble import TiltedEnsembleSpec
from .errors import ConfigError
from .heatbath import run_chain
from .spectral import AirySpectrum


def _out_dir(cfg: RunConfig) -> Path:
    d = Path(cfg.output_root) / cfg.command / cfg.config_hash()
    d.mkdir(parents=True, exist_ok=True)
    return d


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path: Path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=False)
        fh.write("\n")


def cmd_sample(cfg: RunConfig, threads: int) -> int:
    spec = cfg.ensemble_spec()
    sched = cfg.schedule
    t0 = time.time()
    samples = run_chain(spec,
                        n_steps=sched["sweeps"],
                        burn_in=sched.get("burn_in", 200),
                        thin=sched.get("thin", 1),
                        seed=cfg.seed)
    out = _out_dir(cfg)
    times = spec.times()
    header = ["snapshot", "t"] + [f"x{i + 1}" for i in range(spec.n)]
    scale = spec.N ** 0.5

    def rows():
        for s in range(len(samples)):
            W = samples.W_snaps[s]
            for j, t in enumerate(times):
                yield [s, repr(float(t))] + [repr(float(W[i, j]) / scale)
                                             for i in range(spec.n)]

    _write_csv(out / "samples.csv", header, rows())
    _write_json(out / "run.json", {
        "spec": spec.to_dict(),
        "schedule": {"sweeps": sched["sweeps"],
                     "burn_in": sched.get("burn_in", 200),
                     "thin": sched.get("thin", 1)},
        "seed": cfg.seed,
        "snapshots": len(samples),
        "acceptance": samples.acceptance_summary(),
        "wall_seconds": round(time.time() - t0, 3),
    })
    print(f"wrote {len(samples)} snapshots to {out / 'samples.csv'}")
    return 0


def cmd_airy_table(cfg: RunConfig, threads: int) -> int:
    a = float(cfg.airy["a"])
    L = int(cfg.airy.get("L", 40))
    spec = AirySpectrum.build(a, L=L)
    out = _out_dir(cfg)
    rows = [[ell, repr(float(spec.omegas[ell])), repr(float(spec.lambdas[ell])),
             repr(float(spec.norms[ell]))] for ell in range(L)]
    _write_csv(out / "airy_table.csv", ["ell", "omega", "lambda", "norm"], rows)
    _write_json(out / "airy.json", {
        "a": a, "L": L, "t_min": spec.t_min(), "kappa_sup": spec.kappa_sup,
    })
    print(f"wrote {L} modes to {out / 'airy_table.csv'}")
    return 0


def cmd_confinement_sweep(cfg: RunConfig, threads: int) -> int:
    params = dict(cfg.sweep)
    for banned in ("seed", "threads"):
        if banned in params:
            raise ConfigError(f"{banned!r} is set by the CLI, not the sweep block")
    if "n_grid" in params:
        params["n_grid"] = tuple(params["n_grid"])
    if "T_grid" in params:
        params["T_grid"] = tuple(params["T_grid"])
    report = verify_mod.check_confinement(seed=cfg.seed, threads=threads,
                                          **params)
    out = _out_dir(cfg)
    cells = report.details["cells"]
    _write_csv(out / "cells.csv",
               ["n", "T", "mean", "stderr", "tail_slope", "drift_flag"],
               [[c["n"], repr(float(c["T"])), repr(c["mean"]),
                 repr(c["stderr"]), repr(c["tail_slope"]),
                 int(c["tail_drift_flag"])] for c in cells])
    _write_json(out / "report.json", report.to_dict(with_wall=True))
    (out / "report_canonical.json").write_bytes(report.canonical_bytes() + b"\n")
    print(f"wrote {len(cells)} cells to {out / 'cells.csv'}; "
          f"sup growth {report.details['sup_growth']:.4f}")
    return 0


# Modest default parameters for the verify command: small enough to finish
# in a few minutes, sized against the measured autocorrelation times.
_VERIFY_DEFAULTS = {
    "scaling": {"n": 1, "T": 2.0, "a": 1.0, "lam": 2.0, "N": 32,
                "samples": 3000},
    "domination": {"steps": 200000,
                   "pairs": [{"lower": {"n": 2, "T": 1.5, "a": 1.0,
                                        "lam": 2.0, "N": 16},
                              "upper": {"n": 2, "T": 1.5, "a": 1.0,
                                        "lam": 1.0, "N": 16}}]},
    "cascade": {"n": 3, "T": 2.0, "a": 1.0, "lam": 2.0, "k": 1, "N": 32,
                "samples": 3000},
    "max_recursion": {"n": 1, "T": 2.0, "a": 1.0, "lam": 2.0, "N": 32,
                      "samples": 2000, "sweep_n_max": 3},
    "confinement": {"alpha": 0.25, "n_grid": (1, 2, 4), "T_grid": (2, 4),
                    "samples": 1200},
    "fs_limit": {"T": 8.0, "a": 0.5, "N": 32, "samples": 3000},
    "spectral": {"a": 0.5},
}


def _bind_check_args(fn, name, *args, **kwargs):
    # check parameters come straight from user YAML; a typo'd name must be
    # a config error, not a TypeError from inside the call
    try:
        inspect.signature(fn).bind(*args, **kwargs)
    except TypeError as exc:
        raise ConfigError(f"check {name!r}: {exc}") from exc


def _run_one_check(name, params, seed, threads):
    params = dict(params)
    for banned in ("seed", "threads"):
        if banned in params:
            raise ConfigError(
                f"{banned!r} is set by the CLI (seeds.master / --threads), "
                f"not per-check parameters")
    if name == "domination":
        steps = params.pop("steps")
        pairs = params.pop("pairs")
        if not isinstance(pairs, (list, tuple)) or not pairs:
            raise ConfigError("domination 'pairs' must be a non-empty list")
        _bind_check_args(verify_mod.check_domination, name,
                         None, None, steps, seed=seed, threads=threads,
                         **params)
        reports = []
        for pair in pairs:
            if not isinstance(pair, dict) or set(pair) != {"lower", "upper"}:
                raise ConfigError(
                    "each domination pair is a mapping with exactly "
                    "'lower' and 'upper' ensemble specs")
            lower = TiltedEnsembleSpec.from_dict(pair["lower"])
            upper = TiltedEnsembleSpec.from_dict(pair["upper"])
            reports.append(verify_mod.check_domination(
                lower, upper, steps, seed=seed, threads=threads, **params))
        return reports
    if name == "confinement":
        for key in ("n_grid", "T_grid"):
            if key in params:
                params[key] = tuple(params[key])
    fn = getattr(verify_mod, f"check_{name}")
    _bind_check_args(fn, name, seed=seed, threads=threads, **params)
    return [fn(seed=seed, threads=threads, **params)]


def cmd_verify(cfg: RunConfig, threads: int) -> int:
    requested = cfg.checks or {name: {} for name in KNOWN_CHECKS}
    t0 = time.time()
    reports = []
    for name in KNOWN_CHECKS:
        if name not in requested:
            continue
        params = {**_VERIFY_DEFAULTS.get(name, {}), **requested[name]}
        for idx, rep in enumerate(_run_one_check(name, params, cfg.seed,
                                                 threads)):
            reports.append((name, idx, rep))
            flag = "PASS" if rep.passed else "FAIL"
            note = "" if rep.complete else " [incomplete]"
            print(f"[{flag}] {name}#{idx} statistic={rep.statistic:.6g} "
                  f"threshold={rep.threshold:.6g} "
                  f"({rep.wall_seconds:.1f}s){note}")

    out = _out_dir(cfg)
    _write_csv(out / "checks.csv",
               ["check", "instance", "statistic", "threshold", "passed",
                "complete"],
               [[name, idx, repr(rep.statistic), repr(rep.threshold),
                 int(rep.passed), int(rep.complete)]
                for name, idx, rep in reports])
    _write_json(out / "reports.json",
                [rep.to_dict(with_wall=True) for _, _, rep in reports])
    canonical = b"[" + b",".join(rep.canonical_bytes()
                                 for _, _, rep in reports) + b"]\n"
    (out / "reports_canonical.json").write_bytes(canonical)
    all_pass = all(rep.passed for _, _, rep in reports)
    print(f"{'all checks passed' if all_pass else 'CHECKS FAILED'} "
          f"({len(reports)} reports, {time.time() - t0:.1f}s) -> {out}")
    return 0 if all_pass else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="areatilt",
        description="simulation and checks for ordered paths under "
                    "geometrically growing area tilts")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("sample", "verify", "airy-table", "confinement-sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="YAML run config")
        p.add_argument("--out", default=None, help="output root directory")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for replica sampling")
        p.add_argument("--seed", type=int, default=None,
                       help="override seeds.master from the config")
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        cfg = load_config(args.config, command=args.command,
                          seed_override=args.seed, out_override=args.out)
        runner = {
            "sample": cmd_sample,
            "verify": cmd_verify,
            "airy-table": cmd_airy_table,
            "confinement-sweep": cmd_confinement_sweep,
        }[args.command]
        return runner(cfg, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
