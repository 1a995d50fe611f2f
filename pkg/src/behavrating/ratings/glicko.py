from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .common import pairwise_scores
from .config import SystemConfig


@dataclass(frozen=True)
class GlickoState:
    rating: float = 1500.0
    deviation: float = 350.0


def _g(rd: float, q: float) -> float:
    return 1.0 / math.sqrt(1.0 + 3.0 * q * q * rd * rd / math.pi**2)


def glicko_expected(r: float, r_opp: float, rd_opp: float, q: float = math.log(10) / 400) -> float:
    return 1.0 / (1.0 + 10.0 ** (-_g(rd_opp, q) * (r - r_opp) / 400.0))


def inflate_rd(state: GlickoState, periods: float, cfg: SystemConfig = SystemConfig()) -> GlickoState:
    """Grow the deviation for ``periods`` idle rating periods, capped."""
    if periods <= 0:
        return state
    rd = min(math.sqrt(state.deviation**2 + cfg.glicko_c**2 * periods), cfg.glicko_rd_cap)
    return GlickoState(state.rating, rd)


def glicko_period_update(
    state: GlickoState,
    results: Sequence[tuple[float, float, float]],
    cfg: SystemConfig = SystemConfig(),
    expected_from: float | None = None,
) -> GlickoState:
    """One Glicko-1 rating-period update.

    ``results`` holds ``(opponent rating, opponent RD, score)`` triples.
    ``expected_from`` overrides the rating used in the expected scores,
    which is how team play feeds the team's rating in while each member
    keeps their own deviation.
    """
    if not results:
        return state
    q = cfg.glicko_q
    r = state.rating if expected_from is None else expected_from
    var_inv = 0.0
    gain = 0.0
    for r_opp, rd_opp, score in results:
        g = _g(rd_opp, q)
        e = glicko_expected(r, r_opp, rd_opp, q)
        var_inv += g * g * e * (1.0 - e)
        gain += g * (score - e)
    d2_inv = q * q * var_inv
    precision = 1.0 / state.deviation**2 + d2_inv
    rating = state.rating + q / precision * gain
    rd = min(math.sqrt(1.0 / precision), cfg.glicko_rd_cap)
    return GlickoState(rating, rd)


def glicko_update(
    teams: Sequence[Sequence[GlickoState]],
    ranks: Sequence[int],
    cfg: SystemConfig = SystemConfig(),
) -> list[list[GlickoState]]:
    """Update every member of every team after one match.

    A team plays as its highest-rated member (rating and RD); each other
    team is one game of the period. Members share the team's expected
    scores but step according to their own RD.
    """
    reps = [max(team, key=lambda s: s.rating) for team in teams]
    out = []
    for i, team in enumerate(teams):
        results = [(reps[j].rating, reps[j].deviation, s) for j, s in pairwise_scores(ranks, i)]
        out.append([glicko_period_update(m, results, cfg, expected_from=reps[i].rating) for m in team])
    return out
