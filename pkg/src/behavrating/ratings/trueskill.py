"""TrueSkill updates: exact for two teams, adjacent-pairs chain for more.

The multi-team case runs the two-team update on every pair of neighbours
in the finishing order, all against the pre-match priors, and combines the
per-pair mean shifts additively and the variance shrink factors
multiplicatively. This is an approximation of full message passing on the
factor graph: in a three-player game the winner's mean moves less than
under the exact schedule.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

from scipy.special import log_ndtr, ndtr, ndtri

from .config import SystemConfig

SIGMA_FLOOR = 1e-6
_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


@dataclass(frozen=True)
class TrueSkillState:
    mean: float = 25.0
    sigma: float = 25.0 / 3


def conservative(state: TrueSkillState, k: float = 3.0) -> float:
    """Leaderboard scalar ``mean - k * sigma``."""
    return state.mean - k * state.sigma


def _pdf(x: float) -> float:
    return math.exp(-0.5 * x * x - _LOG_SQRT_2PI)


def v_win(t: float, eps: float) -> float:
    x = t - eps
    return math.exp(-0.5 * x * x - _LOG_SQRT_2PI - float(log_ndtr(x)))


def w_win(t: float, eps: float) -> float:
    v = v_win(t, eps)
    return v * (v + t - eps)


def v_draw(t: float, eps: float) -> float:
    a = abs(t)
    denom = float(ndtr(eps - a) - ndtr(-eps - a))
    if denom < 1e-300:
        v = -a + eps if a > eps else 0.0
    else:
        v = (_pdf(-eps - a) - _pdf(eps - a)) / denom
    return -v if t < 0 else v


def w_draw(t: float, eps: float) -> float:
    a = abs(t)
    denom = float(ndtr(eps - a) - ndtr(-eps - a))
    if denom < 1e-300:
        return 1.0
    v = v_draw(a, eps)
    return v * v + ((eps - a) * _pdf(eps - a) + (eps + a) * _pdf(eps + a)) / denom


def draw_margin(draw_probability: float, beta: float, n_players: int) -> float:
    return float(ndtri((draw_probability + 1.0) / 2.0)) * math.sqrt(n_players) * beta


def _pair_update(
    upper: Sequence[tuple[float, float]],
    lower: Sequence[tuple[float, float]],
    drawn: bool,
    cfg: SystemConfig,
) -> tuple[list[tuple[float, float]], list[tuple[float, float]]]:
    """(mean shift, variance factor) per member for ``upper`` beating (or drawing) ``lower``.

    Members are (mean, variance) pairs with the dynamics noise already added.
    """
    n = len(upper) + len(lower)
    c2 = sum(v for _, v in upper) + sum(v for _, v in lower) + n * cfg.trueskill_beta**2
    c = math.sqrt(c2)
    t = (sum(m for m, _ in upper) - sum(m for m, _ in lower)) / c
    eps = draw_margin(cfg.draw_probability, cfg.trueskill_beta, n) / c
    if drawn:
        v, w = v_draw(t, eps), w_draw(t, eps)
    else:
        v, w = v_win(t, eps), w_win(t, eps)
    up = [(var / c * v, 1.0 - var / c2 * w) for _, var in upper]
    down = [(-var / c * v, 1.0 - var / c2 * w) for _, var in lower]
    return up, down


def trueskill_update(
    teams: Sequence[Sequence[TrueSkillState]],
    ranks: Sequence[int],
    cfg: SystemConfig = SystemConfig(),
) -> list[list[TrueSkillState]]:
    """Post-match states for every member, in the input team order."""
    tau2 = cfg.trueskill_tau**2
    priors = [[(s.mean, s.sigma**2 + tau2) for s in team] for team in teams]
    shift = [[0.0] * len(team) for team in teams]
    factor = [[1.0] * len(team) for team in teams]

    order = sorted(range(len(teams)), key=lambda i: ranks[i])
    for a, b in zip(order, order[1:]):
        up, down = _pair_update(priors[a], priors[b], ranks[a] == ranks[b], cfg)
        for team_idx, changes in ((a, up), (b, down)):
            for k, (d_mean, d_var) in enumerate(changes):
                shift[team_idx][k] += d_mean
                factor[team_idx][k] *= d_var

    out = []
    for i, team in enumerate(teams):
        updated = []
        for k, (mean, var) in enumerate(priors[i]):
            new_var = var * factor[i][k]
            sigma = math.sqrt(new_var) if new_var > 0 else 0.0
            if sigma < SIGMA_FLOOR:
                warnings.warn(f"TrueSkill sigma underflow ({sigma:.3g}); clamped to {SIGMA_FLOOR}", RuntimeWarning)
                sigma = SIGMA_FLOOR
            updated.append(TrueSkillState(mean + shift[i][k], sigma))
        out.append(updated)
    return out
