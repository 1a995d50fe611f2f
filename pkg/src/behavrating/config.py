"""Run configuration: a JSON document naming everything a run depends on."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Mapping

from .errors import ValidationError
from .evaluation import DEFAULT_SETUPS, SetupSpec, parse_source
from .fit.logit import DEFAULT_LAMBDAS
from .ratings import SystemConfig
from .synth import SynthConfig

SCHEMA_NAMES = ("halo_slayer", "halo_ctf", "csgo", "pubg_duo", "synthetic")
DEFAULT_SOURCES = ("elo", "glicko", "trueskill", "mu:kd_ratio", "naive", "weighted")
FIXTURE_PREFIX = "fixture:"


@dataclass(frozen=True)
class FactorOverrides:
    """Knobs for the factor fit; ``enabled=False`` fits weights on raw features."""

    enabled: bool = True
    n_factors: int | None = None
    threshold: float = 0.4
    gamma: float = 0.0

    def __post_init__(self):
        if self.n_factors is not None and self.n_factors < 1:
            raise ValidationError("n_factors must be at least 1")
        if not 0 < self.threshold < 1:
            raise ValidationError("factor threshold must lie in (0, 1)")


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on.

    ``weights`` and ``factors`` name model artifacts: ``"fixture:<dataset>"``
    selects a shipped fixture, any other string is a path resolved against
    the artifact directory, and ``None`` means ``weights.json`` /
    ``factors.json`` in that directory. With ``fit=True`` both models are
    refitted from the log and written to the artifact directory instead.
    """

    schema: str = "synthetic"
    system: SystemConfig = SystemConfig()
    zscore_mode: str = "incremental"
    snapshot_every: int = 1000
    seed: int = 0
    setups: tuple[SetupSpec, ...] = DEFAULT_SETUPS
    sources: tuple[str, ...] = DEFAULT_SOURCES
    lambdas: tuple[float, ...] = DEFAULT_LAMBDAS
    cv_folds: int = 5
    fit: bool = False
    fit_kind: str = "auto"
    factor_overrides: FactorOverrides = FactorOverrides()
    weights: str | None = None
    factors: str | None = None
    figures: bool = True

    def __post_init__(self):
        if self.schema not in SCHEMA_NAMES:
            raise ValidationError(f"unknown schema {self.schema!r}")
        if self.zscore_mode not in ("incremental", "snapshot"):
            raise ValidationError(f"unknown zscore mode {self.zscore_mode!r}")
        if self.snapshot_every <= 0 or self.cv_folds < 2:
            raise ValidationError("snapshot_every must be positive and cv_folds at least 2")
        if self.fit_kind not in ("auto", "binary", "ordinal"):
            raise ValidationError(f"unknown fit kind {self.fit_kind!r}")
        if not self.sources or len(set(self.sources)) != len(self.sources):
            raise ValidationError("sources must be a non-empty list without repeats")
        for s in self.sources:
            parse_source(s)
        if not self.lambdas or any(lam < 0 for lam in self.lambdas):
            raise ValidationError("lambda grid must be non-empty and non-negative")
        kinds = [s.kind for s in self.setups]
        if not kinds or len(set(kinds)) != len(kinds):
            raise ValidationError("setups must be non-empty with distinct kinds")

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "system": self.system.to_dict(),
            "zscore_mode": self.zscore_mode,
            "snapshot_every": self.snapshot_every,
            "seed": self.seed,
            "setups": [asdict(s) for s in self.setups],
            "sources": list(self.sources),
            "lambdas": list(self.lambdas),
            "cv_folds": self.cv_folds,
            "fit": self.fit,
            "fit_kind": self.fit_kind,
            "factor_overrides": asdict(self.factor_overrides),
            "weights": self.weights,
            "factors": self.factors,
            "figures": self.figures,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config key(s) {sorted(unknown)}")
        kw = dict(data)
        try:
            if "system" in kw:
                kw["system"] = SystemConfig(**kw["system"])
            if "setups" in kw:
                kw["setups"] = tuple(SetupSpec(**s) if isinstance(s, Mapping) else _named_setup(s) for s in kw["setups"])
            if "factor_overrides" in kw:
                kw["factor_overrides"] = FactorOverrides(**kw["factor_overrides"])
            for key in ("sources", "lambdas"):
                if key in kw:
                    kw[key] = tuple(kw[key])
            return cls(**kw)
        except TypeError as exc:
            raise ValidationError(f"invalid config: {exc}") from None
        except ValueError as exc:
            raise ValidationError(str(exc)) from None

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _named_setup(name: str) -> SetupSpec:
    factories = {"all_players": SetupSpec.all_players, "top_tier": SetupSpec.top_tier, "frequent": SetupSpec.frequent}
    if name not in factories:
        raise ValidationError(f"unknown setup {name!r}")
    return factories[name]()


def _load_json(path: str | os.PathLike) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: expected a JSON object")
    return data


def load_run_config(path: str | os.PathLike) -> RunConfig:
    return RunConfig.from_dict(_load_json(path))


def load_synth_config(path: str | os.PathLike) -> SynthConfig:
    data = _load_json(path)
    try:
        return SynthConfig(**data)
    except TypeError as exc:
        raise ValidationError(f"invalid synth config: {exc}") from None
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
