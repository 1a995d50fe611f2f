"""Rank prediction from team ratings and the accuracy / NDCG scores."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .core import Mode


@dataclass(frozen=True)
class PredictionRecord:
    match_id: str
    source: str
    mode: Mode
    predicted_ranks: Mapping[str, int]
    observed_ranks: Mapping[str, int]
    team_values: Mapping[str, float] = field(default_factory=dict)
    seed: int | None = None

    @property
    def is_draw(self) -> bool:
        return sum(1 for r in self.observed_ranks.values() if r == 1) > 1


def predict_ranks(team_ratings: Mapping[str, float], rng: np.random.Generator) -> dict[str, int]:
    """Sort teams by rating, highest first; exact ties are shuffled by ``rng``.

    One uniform key per team is always drawn, so the stream advances by the
    same amount whether or not ties occur.
    """
    slots = list(team_ratings)
    if len(slots) < 2:
        raise ValueError("rank prediction needs at least 2 teams")
    values = [float(team_ratings[s]) for s in slots]
    for s, v in zip(slots, values):
        if not math.isfinite(v):
            raise ValueError(f"non-finite rating {v!r} for team {s!r}")
    keys = rng.random(len(slots))
    order = sorted(range(len(slots)), key=lambda i: (-values[i], keys[i]))
    return {slots[i]: pos + 1 for pos, i in enumerate(order)}


def accuracy(records: Iterable[PredictionRecord]) -> float:
    """Share of head-to-head matches whose predicted winner won.

    Drawn matches have no winner and are left out.
    """
    hits = total = 0
    for rec in records:
        if Mode(rec.mode) is not Mode.HEAD_TO_HEAD:
            raise ValueError(f"accuracy is defined for head-to-head matches only (match {rec.match_id})")
        if rec.is_draw:
            continue
        predicted = min(rec.predicted_ranks, key=rec.predicted_ranks.get)
        observed = min(rec.observed_ranks, key=rec.observed_ranks.get)
        hits += predicted == observed
        total += 1
    if total == 0:
        raise ValueError("no evaluable matches")
    return hits / total


def ndcg_from_orders(predicted_order: list[str], observed_ranks: Mapping[str, int]) -> float:
    """NDCG of a predicted team order; a team's relevance is ``T - observed rank``."""
    t = len(observed_ranks)
    rel = {slot: t - r for slot, r in observed_ranks.items()}
    dcg = sum(rel[slot] / math.log2(i + 2) for i, slot in enumerate(predicted_order))
    ideal = sorted(rel.values(), reverse=True)
    idcg = sum(r / math.log2(i + 2) for i, r in enumerate(ideal))
    return dcg / idcg if idcg > 0 else 1.0


def ndcg(record: PredictionRecord) -> float:
    order = sorted(record.predicted_ranks, key=record.predicted_ranks.get)
    return ndcg_from_orders(order, record.observed_ranks)


def mean_ndcg(records: Iterable[PredictionRecord]) -> float:
    scores = [ndcg(r) for r in records]
    if not scores:
        raise ValueError("no evaluable matches")
    return float(np.mean(scores))
