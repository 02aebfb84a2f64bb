"""YAML run configuration: parsing, normalization, hashing.

A run is described by one YAML document with these blocks:

    command:  sample | verify | airy-table | confinement-sweep   (optional;
              must match the CLI subcommand when present)
    spec:     ensemble parameters (n, T, a, lam, N, optional boundary
              fields) for the commands that run a chain directly
    schedule: sweeps, burn_in, thin  (sample command)
    seeds:    master: <int>   -- required for any randomized command; there
              is deliberately no wall-clock fallback
    output:   root: <dir>     -- default "out", overridable by --out
    checks:   mapping of check name -> parameter overrides (verify command)
    sweep:    confinement-sweep parameters (alpha, grids, schedule)
    airy:     a, L for the airy-table command

Everything that influences results is folded into a canonical normalized
dictionary; its SHA-256 prefix names the output directory, so identical
configurations land in identical places and reruns overwrite byte-for-byte.
Execution details that must not change results (thread count, output root)
are excluded from the hash.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import yaml

from .ensemble import TiltedEnsembleSpec
from .errors import ConfigError

KNOWN_COMMANDS = ("sample", "verify", "airy-table", "confinement-sweep")
RANDOMIZED_COMMANDS = ("sample", "verify", "confinement-sweep")
KNOWN_CHECKS = ("scaling", "domination", "cascade", "max_recursion",
                "confinement", "fs_limit", "spectral")
_TOP_KEYS = {"command", "spec", "schedule", "seeds", "output", "checks",
             "sweep", "airy"}


@dataclass
class RunConfig:
    command: str
    spec: dict | None = None
    schedule: dict = field(default_factory=dict)
    seed: int | None = None
    output_root: str = "out"
    checks: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    airy: dict = field(default_factory=dict)

    def ensemble_spec(self) -> TiltedEnsembleSpec:
        if self.spec is None:
            raise ConfigError("this command needs a 'spec' block")
        return TiltedEnsembleSpec.from_dict(self.spec)

    def normalized(self) -> dict:
        """Canonical dictionary of everything that determines the results."""
        out = {"command": self.command}
        if self.spec is not None:
            # round-trip through the spec type so equivalent spellings of
            # the same ensemble normalize identically
            out["spec"] = self.ensemble_spec().to_dict()
        if self.schedule:
            out["schedule"] = {k: self.schedule[k] for k in sorted(self.schedule)}
        if self.seed is not None:
            out["seeds"] = {"master": int(self.seed)}
        if self.checks:
            out["checks"] = {
                name: {k: self.checks[name][k] for k in sorted(self.checks[name])}
                for name in sorted(self.checks)
            }
        if self.sweep:
            out["sweep"] = {k: self.sweep[k] for k in sorted(self.sweep)}
        if self.airy:
            out["airy"] = {k: self.airy[k] for k in sorted(self.airy)}
        return out

    def config_hash(self) -> str:
        blob = json.dumps(self.normalized(), sort_keys=True,
                          separators=(",", ":"), allow_nan=False)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _check_params(raw):
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError("'checks' must map check names to parameter dicts")
    checks = {}
    for name, params in raw.items():
        if name not in KNOWN_CHECKS:
            raise ConfigError(
                f"unknown check {name!r}; known: {', '.join(KNOWN_CHECKS)}")
        if params is None:
            params = {}
        if not isinstance(params, dict):
            raise ConfigError(f"parameters of check {name!r} must be a mapping")
        checks[name] = params
    return checks


def load_config(path, command=None, seed_override=None, out_override=None
                ) -> RunConfig:
    """Parse and validate a YAML config file.

    command: the CLI subcommand; a 'command' key in the file must agree.
    seed_override / out_override: CLI flags, applied after parsing (the seed
    override participates in the config hash; the output root does not).
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file is not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    file_cmd = raw.get("command")
    if file_cmd is not None and file_cmd not in KNOWN_COMMANDS:
        raise ConfigError(f"unknown command {file_cmd!r}")
    if command is None:
        command = file_cmd
    if command is None:
        raise ConfigError("no command given (CLI subcommand or 'command' key)")
    if file_cmd is not None and file_cmd != command:
        raise ConfigError(
            f"config file says command {file_cmd!r} but {command!r} was invoked")

    seeds = raw.get("seeds") or {}
    if not isinstance(seeds, dict):
        raise ConfigError("'seeds' must be a mapping with a 'master' entry")
    seed = seeds.get("master")
    if seed_override is not None:
        seed = seed_override
    if seed is not None:
        seed = int(seed)
    if command in RANDOMIZED_COMMANDS and seed is None:
        raise ConfigError(
            f"command {command!r} needs seeds.master (or --seed); results "
            "must be replayable, so no clock-based default is provided")

    output = raw.get("output") or {}
    if not isinstance(output, dict):
        raise ConfigError("'output' must be a mapping")
    out_root = output.get("root", "out")
    if out_override is not None:
        out_root = out_override

    schedule = raw.get("schedule") or {}
    if not isinstance(schedule, dict):
        raise ConfigError("'schedule' must be a mapping")
    for key in schedule:
        if key not in ("sweeps", "burn_in", "thin"):
            raise ConfigError(f"unknown schedule key {key!r}")
    schedule = {k: int(v) for k, v in schedule.items()}

    cfg = RunConfig(
        command=command,
        spec=raw.get("spec"),
        schedule=schedule,
        seed=seed,
        output_root=str(out_root),
        checks=_check_params(raw.get("checks")),
        sweep=dict(raw.get("sweep") or {}),
        airy=dict(raw.get("airy") or {}),
    )
    if command == "sample":
        cfg.ensemble_spec()          # validate eagerly
        if "sweeps" not in cfg.schedule:
            raise ConfigError("sample command needs schedule.sweeps")
    if command == "airy-table" and "a" not in cfg.airy:
        raise ConfigError("airy-table command needs airy.a")
    if command == "confinement-sweep" and "alpha" not in cfg.sweep:
        raise ConfigError("confinement-sweep command needs sweep.alpha")
    return cfg
