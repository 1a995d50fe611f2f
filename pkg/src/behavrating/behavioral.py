"""Behavioral ratings: single-factor, naive hybrid, factor scores and weighted hybrid.

All ratings are linear in the Z-scored feature values, so a player with an
all-zero vector (a newcomer) rates exactly 0 under every family.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping

from .errors import ValidationError
from .features import FEATURES, FeatureVector

# Σ|·| = 1 ± 1e-6, plus slack for binary rounding of six-decimal table values
SUM_TOLERANCE = 1e-6 + 1e-12

PROVENANCES = ("fitted", "paper_fixture")
FIXTURE_DATASETS = ("halo_slayer", "halo_ctf", "csgo", "pubg_duo")


def _check_unit_abs_sum(values: Mapping[str, float], what: str) -> None:
    total = sum(abs(v) for v in values.values())
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise ValidationError(f"{what}: absolute values sum to {total!r}, expected 1")


@dataclass(frozen=True)
class FactorModel:
    """Named factors, each a map from feature id to normalized loading."""

    factors: tuple[tuple[str, dict[str, float]], ...]
    provenance: str = "fitted"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple((name, dict(ld)) for name, ld in self.factors))
        if self.provenance not in PROVENANCES:
            raise ValidationError(f"unknown provenance {self.provenance!r}")
        seen: dict[str, str] = {}
        for name, loadings in self.factors:
            if not loadings:
                raise ValidationError(f"factor {name!r} has no features")
            _check_unit_abs_sum(loadings, f"factor {name!r}")
            for feat in loadings:
                if feat in seen:
                    raise ValidationError(f"feature {feat!r} loads on both {seen[feat]!r} and {name!r}")
                seen[feat] = name

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.factors)

    def loadings(self, name: str) -> dict[str, float]:
        for factor, ld in self.factors:
            if factor == name:
                return ld
        raise KeyError(f"unknown factor {name!r}")

    def absorbed(self) -> set[str]:
        """Features that belong to some factor."""
        return {f for _, ld in self.factors for f in ld}

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "factors": [{"name": n, "loadings": ld} for n, ld in self.factors],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> FactorModel:
        return cls(
            tuple((f["name"], {k: float(v) for k, v in f["loadings"].items()}) for f in data["factors"]),
            provenance=data.get("provenance", "fitted"),
            metadata=dict(data.get("metadata", {})),
        )


@dataclass(frozen=True)
class WeightModel:
    """Sign-preserving normalized weights over rating terms (features or factors)."""

    weights: dict[str, float]
    provenance: str = "fitted"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValidationError(f"unknown provenance {self.provenance!r}")
        if not self.weights:
            raise ValidationError("weight model has no terms")
        _check_unit_abs_sum(self.weights, "weight model")

    def to_dict(self) -> dict:
        return {"provenance": self.provenance, "weights": dict(self.weights), "metadata": self.metadata}

    @classmethod
    def from_dict(cls, data: Mapping) -> WeightModel:
        return cls(
            {k: float(v) for k, v in data["weights"].items()},
            provenance=data.get("provenance", "fitted"),
            metadata=dict(data.get("metadata", {})),
        )


def load_fixture(dataset: str) -> tuple[FactorModel, WeightModel]:
    """Published factor loadings and weights for one of the four game modes."""
    if dataset not in FIXTURE_DATASETS:
        raise KeyError(f"no fixture for {dataset!r}; known: {', '.join(FIXTURE_DATASETS)}")
    text = resources.files(__package__).joinpath("fixtures", f"{dataset}.json").read_text(encoding="utf-8")
    data = json.loads(text)
    return FactorModel.from_dict(data["factors"]), WeightModel.from_dict(data["weights"])


def single_factor(vector: FeatureVector | Mapping[str, float], feature: str) -> float:
    if feature not in FEATURES:
        raise KeyError(f"unknown feature id {feature!r}")
    if feature not in vector:
        raise KeyError(f"feature {feature!r} not present in vector")
    return float(vector[feature])


def naive_hybrid(vector: FeatureVector | Mapping[str, float]) -> float:
    return float(sum(vector[f] for f in vector))


def factor_score(vector: FeatureVector | Mapping[str, float], model: FactorModel, factor: str) -> float:
    loadings = model.loadings(factor)
    missing = [f for f in loadings if f not in vector]
    if missing:
        raise KeyError(f"factor {factor!r} needs missing feature(s) {missing}")
    return float(sum(ld * vector[f] for f, ld in loadings.items()))


def weighted_hybrid(terms: Mapping[str, float], model: WeightModel) -> float:
    missing = [t for t in model.weights if t not in terms]
    if missing:
        raise KeyError(f"weighted hybrid missing term(s) {missing}")
    return float(sum(w * terms[t] for t, w in model.weights.items()))


def term_values(
    vector: FeatureVector | Mapping[str, float],
    terms: tuple[str, ...] | list[str],
    factors: FactorModel | None = None,
) -> dict[str, float]:
    """Resolve each term to a factor score or a raw feature value."""
    factor_names = set(factors.names) if factors is not None else set()
    out = {}
    for t in terms:
        out[t] = factor_score(vector, factors, t) if t in factor_names else single_factor(vector, t)
    return out


def weighted_rating(vector: FeatureVector | Mapping[str, float], weights: WeightModel, factors: FactorModel | None = None) -> float:
    """Weighted hybrid rating straight from a Z-scored feature vector."""
    return weighted_hybrid(term_values(vector, list(weights.weights), factors), weights)
