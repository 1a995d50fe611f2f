"""Stateful per-player rating stores that apply the pure updates match by match."""

from __future__ import annotations

from typing import Protocol

from ..core import MatchRecord, PlayerId
from .config import SystemConfig
from .elo import elo_update
from .glicko import GlickoState, glicko_update, inflate_rd
from .trueskill import TrueSkillState, conservative, trueskill_update


class RatingSystem(Protocol):
    def value(self, player: PlayerId) -> float: ...

    def update(self, match: MatchRecord) -> None: ...


def _ranks(match: MatchRecord) -> list[int]:
    return [match.observed_ranks[t.slot] for t in match.teams]


class EloSystem:
    def __init__(self, cfg: SystemConfig = SystemConfig()):
        self.cfg = cfg
        self.ratings: dict[PlayerId, float] = {}

    def value(self, player: PlayerId) -> float:
        return self.ratings.get(player, self.cfg.elo_initial)

    def update(self, match: MatchRecord) -> None:
        teams = [[self.value(p) for p in t.members] for t in match.teams]
        deltas = elo_update(teams, _ranks(match), self.cfg)
        for team, team_deltas, team_ratings in zip(match.teams, deltas, teams):
            for p, d, r in zip(team.members, team_deltas, team_ratings):
                self.ratings[p] = r + d


class GlickoSystem:
    """Glicko-1 with one rating period per match.

    Deviation growth for idle periods is applied lazily when a player next
    appears, which is equivalent to inflating every idle player each period.
    """

    def __init__(self, cfg: SystemConfig = SystemConfig()):
        self.cfg = cfg
        self.states: dict[PlayerId, GlickoState] = {}
        self.last_period: dict[PlayerId, int] = {}
        self.period = 0

    def value(self, player: PlayerId) -> float:
        state = self.states.get(player)
        return self.cfg.glicko_initial if state is None else state.rating

    def state(self, player: PlayerId) -> GlickoState:
        """Current state including idle-period deviation growth."""
        state = self.states.get(player)
        if state is None:
            return GlickoState(self.cfg.glicko_initial, self.cfg.glicko_rd_cap)
        if self.cfg.glicko_period == "game":
            idle = 1
        else:
            idle = self.period - self.last_period[player]
        return inflate_rd(state, idle, self.cfg)

    def update(self, match: MatchRecord) -> None:
        self.period += 1
        teams = [[self.state(p) for p in t.members] for t in match.teams]
        new = glicko_update(teams, _ranks(match), self.cfg)
        for team, states in zip(match.teams, new):
            for p, s in zip(team.members, states):
                self.states[p] = s
                self.last_period[p] = self.period


class TrueSkillSystem:
    def __init__(self, cfg: SystemConfig = SystemConfig()):
        self.cfg = cfg
        self.states: dict[PlayerId, TrueSkillState] = {}

    def state(self, player: PlayerId) -> TrueSkillState:
        return self.states.get(player) or TrueSkillState(self.cfg.trueskill_mu, self.cfg.trueskill_sigma)

    def value(self, player: PlayerId) -> float:
        return conservative(self.state(player))

    def update(self, match: MatchRecord) -> None:
        teams = [[self.state(p) for p in t.members] for t in match.teams]
        new = trueskill_update(teams, _ranks(match), self.cfg)
        for team, states in zip(match.teams, new):
            for p, s in zip(team.members, states):
                self.states[p] = s
