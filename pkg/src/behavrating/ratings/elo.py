from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .common import pairwise_scores, team_rating
from .config import SystemConfig


@dataclass(frozen=True)
class EloState:
    rating: float = 1500.0


def elo_expected(r_a: float, r_b: float) -> float:
    """Expected score of a side rated ``r_a`` against one rated ``r_b``."""
    return 1.0 / (1.0 + 10.0 ** ((r_b - r_a) / 400.0))


def elo_update(
    teams: Sequence[Sequence[float]],
    ranks: Sequence[int],
    cfg: SystemConfig = SystemConfig(),
) -> list[list[float]]:
    """Per-member rating deltas for one match.

    Each team is represented by its best member. A team's delta is
    ``K * mean_j(S_ij - E_ij)`` over all opposing teams ``j`` and is applied
    to every member; with two teams this is the usual head-to-head update.
    """
    strengths = [team_rating(t) for t in teams]
    deltas = []
    for i, members in enumerate(teams):
        pairs = pairwise_scores(ranks, i)
        surprise = sum(s - elo_expected(strengths[i], strengths[j]) for j, s in pairs) / len(pairs)
        deltas.append([cfg.elo_k * surprise] * len(members))
    return deltas
