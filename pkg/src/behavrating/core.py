"""Canonical data model for matches, teams and per-player statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import ValidationError

PlayerId = str


class Mode(str, Enum):
    HEAD_TO_HEAD = "head_to_head"
    FREE_FOR_ALL = "free_for_all"


COUNT_STATS = (
    "kills",
    "deaths",
    "headshots",
    "dbno",
    "melee_kills",
    "grenade_kills",
    "longest_spree",
    "kill_assists",
    "flash_assists",
    "flag_steals",
    "betrayals",
    "suicides",
)
REAL_STATS = ("damage_dealt", "time_alive", "walk_distance", "ride_distance")
STAT_NAMES = COUNT_STATS + REAL_STATS


@dataclass(frozen=True)
class RawMatchStats:
    """Per-player raw quantities for one match.

    A field left as ``None`` means the dataset does not record it, which is
    distinct from a recorded zero.
    """

    kills: int | None = None
    deaths: int | None = None
    headshots: int | None = None
    damage_dealt: float | None = None
    dbno: int | None = None
    melee_kills: int | None = None
    grenade_kills: int | None = None
    longest_spree: int | None = None
    time_alive: float | None = None
    walk_distance: float | None = None
    ride_distance: float | None = None
    kill_assists: int | None = None
    flash_assists: int | None = None
    flag_steals: int | None = None
    betrayals: int | None = None
    suicides: int | None = None

    @classmethod
    def from_mapping(cls, values: Mapping[str, float]) -> RawMatchStats:
        unknown = set(values) - set(STAT_NAMES)
        if unknown:
            raise ValidationError(f"unknown statistic(s): {sorted(unknown)}")
        coerced = {}
        for name, value in values.items():
            if value is None:
                continue
            if name in COUNT_STATS:
                if isinstance(value, float) and value.is_integer():
                    value = int(value)
                if not isinstance(value, int) or isinstance(value, bool):
                    raise ValidationError(f"statistic {name!r} must be an integer count, got {value!r}")
            else:
                value = float(value)
            coerced[name] = value
        return cls(**coerced)

    def available(self) -> dict[str, float]:
        """Recorded statistics only, in canonical field order."""
        return {f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) is not None}


@dataclass(frozen=True)
class Team:
    slot: str
    members: tuple[PlayerId, ...]
    stats: tuple[RawMatchStats, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "stats", tuple(self.stats))


@dataclass(frozen=True)
class MatchRecord:
    match_id: str
    timestamp: int
    mode: Mode
    teams: tuple[Team, ...]
    observed_ranks: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "teams", tuple(self.teams))
        object.__setattr__(self, "observed_ranks", dict(self.observed_ranks))

    @property
    def team_count(self) -> int:
        return len(self.teams)

    @property
    def slots(self) -> tuple[str, ...]:
        return tuple(t.slot for t in self.teams)

    @property
    def has_tie(self) -> bool:
        ranks = list(self.observed_ranks.values())
        return len(set(ranks)) < len(ranks)

    @property
    def is_draw(self) -> bool:
        """True when more than one team shares first place."""
        return sum(1 for r in self.observed_ranks.values() if r == 1) > 1

    def players(self) -> Iterable[PlayerId]:
        for team in self.teams:
            yield from team.members

    def sort_key(self) -> tuple[int, str]:
        return (self.timestamp, self.match_id)


def is_competition_ranking(ranks: Sequence[int]) -> bool:
    """Check that ``ranks`` is a standard competition ranking of its length.

    Tied entries share a rank and the next distinct rank skips accordingly,
    e.g. (1, 1, 3). Every value lies in 1..len(ranks).
    """
    return all(r == 1 + sum(1 for other in ranks if other < r) for r in ranks)


def validate_match(record: MatchRecord) -> MatchRecord:
    """Return ``record`` unchanged if every invariant holds, else raise."""
    mid = record.match_id

    def fail(rule: str) -> None:
        raise ValidationError(f"match {mid}: {rule}")

    if not mid:
        fail("empty match_id")
    if isinstance(record.timestamp, bool) or not isinstance(record.timestamp, int):
        fail("timestamp must be integer epoch milliseconds")
    if record.team_count < 2:
        fail("fewer than 2 teams")
    if record.mode is Mode.HEAD_TO_HEAD and record.team_count != 2:
        fail(f"head_to_head requires exactly 2 teams, got {record.team_count}")

    slots = record.slots
    if len(set(slots)) != len(slots):
        fail("duplicate team slot")
    seen: set[str] = set()
    for team in record.teams:
        if not team.members:
            fail(f"empty roster for team {team.slot}")
        if len(team.stats) != len(team.members):
            fail(f"team {team.slot} has {len(team.members)} members but {len(team.stats)} stat rows")
        for player, stats in zip(team.members, team.stats):
            if not player:
                fail("empty player id")
            if player in seen:
                fail(f"duplicate player {player!r} across teams")
            seen.add(player)
            for name, value in stats.available().items():
                if not math.isfinite(value):
                    fail(f"non-finite statistic {name}={value!r} for player {player!r}")
                if value < 0:
                    fail(f"negative statistic {name}={value!r} for player {player!r}")

    if set(record.observed_ranks) != set(slots):
        fail("observed_ranks must name every team slot exactly once")
    ranks = [record.observed_ranks[s] for s in slots]
    if any(isinstance(r, bool) or not isinstance(r, int) for r in ranks):
        fail("ranks must be integers")
    if not is_competition_ranking(ranks):
        fail(f"rank set {sorted(ranks)} does not cover 1..{len(ranks)}")
    return record


def competition_ranks(scores: Sequence[float], higher_is_better: bool = False) -> list[int]:
    """Convert raw placements or scores into competition ranks (1 = best)."""
    keyed = [(-s if higher_is_better else s) for s in scores]
    return [1 + sum(1 for other in keyed if other < k) for k in keyed]
