"""Run configuration: JSON in, validated dataclass out."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .fock import DEFAULT_N_TRUNC, DEFAULT_SAFE_MARGIN, ModeSpec
from .landau import DomainError, LandauParams

SCHEMA_VERSION = "jordanlandau-report/1"

DEFAULT_TOLERANCES = {
    "algebra": 1e-12,
    "basis": 1e-13,
    "heisenberg": 1e-10,
    "spectrum": 1e-6,
    "convergence": 1e-8,
    "associator": 1e-8,
    "coefficients": 1e-10,
    "decomposition": 1e-10,
    "evolution": 1e-8,
    "states": 1e-13,
}

DEFAULT_HEADER = (
    "Natural units (hbar = m = 1 unless overridden). 'params' is one parameter point; "
    "'sweep' (a list of params objects) replaces it when present. truncation: Fock cutoff "
    "per mode and safe margin (occupations above n_trunc - safe_margin - 1 are excluded from "
    "assertions). evolution_truncation: cutoff used for the per-chirality evolution claims. "
    "checks: claim ids to run, empty for the full catalog. draws: random samples per "
    "randomized claim. seed: PCG64 seed for all random draws."
)


class ConfigError(ValueError):
    """Malformed or inconsistent configuration; maps to exit code 2."""


@dataclass
class RunConfig:
    points: list[LandauParams] = field(default_factory=lambda: [LandauParams()])
    truncation: ModeSpec = field(default_factory=lambda: ModeSpec(DEFAULT_N_TRUNC, DEFAULT_SAFE_MARGIN))
    evolution_truncation: ModeSpec = field(default_factory=lambda: ModeSpec(12, 6))
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    checks: list[str] = field(default_factory=list)
    seed: int = 0
    draws: int = 50
    units: str = "natural"
    out: str | None = None

    def to_dict(self) -> dict:
        return {
            "units": self.units,
            "sweep": [asdict(p) for p in self.points],
            "truncation": asdict(self.truncation),
            "evolution_truncation": asdict(self.evolution_truncation),
            "tolerances": dict(self.tolerances),
            "checks": list(self.checks),
            "draws": self.draws,
            "seed": self.seed,
        }


def default_config_document() -> dict:
    cfg = RunConfig()
    doc = {"_comment": DEFAULT_HEADER}
    doc.update(cfg.to_dict())
    doc["params"] = doc.pop("sweep")[0]
    return doc


def _mode(d, what) -> ModeSpec:
    try:
        return ModeSpec(int(d["n_trunc"]), int(d["safe_margin"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad {what}: {exc}") from exc


def _params(d) -> LandauParams:
    if not isinstance(d, dict):
        raise ConfigError("params must be an object")
    unknown = set(d) - {"m", "omega", "omega_L", "theta", "hbar"}
    if unknown:
        raise ConfigError(f"unknown parameter fields {sorted(unknown)}")
    try:
        return LandauParams(**{k: float(v) for k, v in d.items()})
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad params: {exc}") from exc


def parse_config(doc: dict, known_claims: set[str] | None = None) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    allowed = {"_comment", "units", "params", "sweep", "truncation", "evolution_truncation",
               "tolerances", "checks", "seed", "draws"}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown configuration keys {sorted(unknown)}")
    cfg = RunConfig()
    cfg.units = doc.get("units", "natural")
    if cfg.units not in ("natural", "SI-like"):
        raise ConfigError(f"units must be 'natural' or 'SI-like', got {cfg.units!r}")
    if "sweep" in doc:
        if not isinstance(doc["sweep"], list) or not doc["sweep"]:
            raise ConfigError("sweep must be a nonempty list of params objects")
        cfg.points = [_params(d) for d in doc["sweep"]]
    elif "params" in doc:
        cfg.points = [_params(doc["params"])]
    if "truncation" in doc:
        cfg.truncation = _mode(doc["truncation"], "truncation")
    if "evolution_truncation" in doc:
        cfg.evolution_truncation = _mode(doc["evolution_truncation"], "evolution_truncation")
    tol = doc.get("tolerances", {})
    unknown = set(tol) - set(DEFAULT_TOLERANCES)
    if unknown:
        raise ConfigError(f"unknown tolerance classes {sorted(unknown)}")
    cfg.tolerances.update({k: float(v) for k, v in tol.items()})
    cfg.checks = list(doc.get("checks", []))
    if known_claims is not None:
        bad = [c for c in cfg.checks if c not in known_claims]
        if bad:
            raise ConfigError(f"unknown claim ids {bad}")
    try:
        cfg.seed = int(doc.get("seed", 0))
        cfg.draws = int(doc.get("draws", cfg.draws))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.draws < 1:
        raise ConfigError("draws must be >= 1")
    return cfg


def load_config(path: str | Path | None, known_claims: set[str] | None = None) -> RunConfig:
    if path is None:
        return parse_config({}, known_claims)
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    return parse_config(doc, known_claims)
