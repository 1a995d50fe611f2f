"""Streaming player profiles, the engineered feature catalog and Z-scoring."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .core import Mode, RawMatchStats
from .errors import ValidationError

# feature id -> raw statistic averaged per game
AVERAGED = {
    "killing_spree": "longest_spree",
    "damage_dealt": "damage_dealt",
    "accuracy": "headshots",
    "dbno": "dbno",
    "melee_kills": "melee_kills",
    "grenade_kills": "grenade_kills",
    "survival": "time_alive",
    "walking_distance": "walk_distance",
    "riding_distance": "ride_distance",
    "kill_assist": "kill_assists",
    "flash_assist": "flash_assists",
    "steal": "flag_steals",
    "betrayal": "betrayals",
    "suicide": "suicides",
}

FEATURES = (
    "kd_ratio",
    "killing_spree",
    "damage_dealt",
    "accuracy",
    "dbno",
    "melee_kills",
    "grenade_kills",
    "winning_rate",
    "rank_ratio",
    "survival",
    "walking_distance",
    "riding_distance",
    "kill_assist",
    "flash_assist",
    "steal",
    "betrayal",
    "suicide",
    "experience",
)


def available_features(stat_names: Iterable[str], modes: Iterable[Mode | str] = (Mode.HEAD_TO_HEAD,)) -> tuple[str, ...]:
    """Features computable from a dataset recording ``stat_names`` in ``modes``."""
    stats = set(stat_names)
    modes = {Mode(m) for m in modes}
    out = []
    for feat in FEATURES:
        if feat == "kd_ratio":
            ok = {"kills", "deaths"} <= stats
        elif feat in AVERAGED:
            ok = AVERAGED[feat] in stats
        elif feat == "rank_ratio":
            ok = Mode.FREE_FOR_ALL in modes
        else:  # winning_rate, experience
            ok = True
        if ok:
            out.append(feat)
    return tuple(out)


@dataclass
class FeatureVector:
    values: dict[str, float]
    zscored: bool = False

    def __getitem__(self, feature: str) -> float:
        return self.values[feature]

    def __contains__(self, feature: str) -> bool:
        return feature in self.values

    def __iter__(self) -> Iterator[str]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class PlayerProfile:
    games_played: int = 0
    wins: int = 0
    totals: dict[str, float] = field(default_factory=dict)
    rank_percentile_sum: float = 0.0

    def copy(self) -> PlayerProfile:
        return PlayerProfile(self.games_played, self.wins, dict(self.totals), self.rank_percentile_sum)


@dataclass(frozen=True)
class MatchContext:
    """Outcome context a profile update needs from the match."""

    rank: int
    team_count: int
    won: bool
    mode: Mode = Mode.HEAD_TO_HEAD


def rank_percentile(rank: int, team_count: int) -> float:
    """Placement mapped onto [0, 1], with 1 for the winner and 0 for last."""
    if team_count < 2:
        raise ValueError(f"rank percentile needs at least 2 teams, got {team_count}")
    if not 1 <= rank <= team_count:
        raise ValueError(f"rank {rank} outside 1..{team_count}")
    return 1.0 - (rank - 1) / (team_count - 1)


def update_profile(profile: PlayerProfile, stats: RawMatchStats, context: MatchContext) -> PlayerProfile:
    """Fold one match into ``profile`` in place and return it."""
    profile.games_played += 1
    if context.won:
        profile.wins += 1
    for name, value in stats.available().items():
        profile.totals[name] = profile.totals.get(name, 0) + value
    if Mode(context.mode) is Mode.FREE_FOR_ALL:
        profile.rank_percentile_sum += rank_percentile(context.rank, context.team_count)
    return profile


def derive_features(profile: PlayerProfile, features: Iterable[str] = FEATURES) -> FeatureVector:
    """Raw feature values for ``profile``.

    Averages divide by ``max(1, games)`` and the KD ratio by
    ``max(1, deaths)``, so a player with no games maps to all zeros.
    """
    games = max(1, profile.games_played)
    totals = profile.totals
    values = {}
    for feat in features:
        if feat == "kd_ratio":
            v = totals.get("kills", 0) / max(1, totals.get("deaths", 0))
        elif feat in AVERAGED:
            v = totals.get(AVERAGED[feat], 0) / games
        elif feat == "winning_rate":
            v = profile.wins / games
        elif feat == "rank_ratio":
            v = profile.rank_percentile_sum / games
        elif feat == "experience":
            v = profile.games_played
        else:
            raise KeyError(f"unknown feature {feat!r}")
        values[feat] = float(v)
    return FeatureVector(values, zscored=False)


class PopulationMoments:
    """Per-feature running count, mean and sum of squared deviations.

    Welford's update, plus the matching downdate so a player's previous
    vector can be retracted when their profile changes.
    """

    def __init__(self, features: Iterable[str] = ()):
        self.count: dict[str, int] = {}
        self.mean: dict[str, float] = {}
        self.m2: dict[str, float] = {}
        for f in features:
            self._ensure(f)

    def _ensure(self, feature: str) -> None:
        if feature not in self.count:
            self.count[feature] = 0
            self.mean[feature] = 0.0
            self.m2[feature] = 0.0

    def add(self, vector: Mapping[str, float] | FeatureVector) -> None:
        for f in vector:
            x = vector[f]
            self._ensure(f)
            n = self.count[f] + 1
            delta = x - self.mean[f]
            self.mean[f] += delta / n
            self.m2[f] += delta * (x - self.mean[f])
            self.count[f] = n

    def remove(self, vector: Mapping[str, float] | FeatureVector) -> None:
        for f in vector:
            x = vector[f]
            n = self.count.get(f, 0)
            if n <= 0:
                raise ValueError(f"cannot remove an observation of {f!r} from empty moments")
            if n == 1:
                self.count[f], self.mean[f], self.m2[f] = 0, 0.0, 0.0
                continue
            old_mean = (n * self.mean[f] - x) / (n - 1)
            self.m2[f] = max(0.0, self.m2[f] - (x - old_mean) * (x - self.mean[f]))
            self.mean[f] = old_mean
            self.count[f] = n - 1

    def variance(self, feature: str) -> float:
        n = self.count[feature]
        return self.m2[feature] / n if n else 0.0

    def std(self, feature: str) -> float:
        return math.sqrt(self.variance(feature))

    def copy(self) -> PopulationMoments:
        other = PopulationMoments()
        other.count, other.mean, other.m2 = dict(self.count), dict(self.mean), dict(self.m2)
        return other

    @classmethod
    def from_vectors(cls, vectors: Iterable[Mapping[str, float] | FeatureVector], features: Iterable[str] = ()) -> PopulationMoments:
        moments = cls(features)
        for v in vectors:
            moments.add(v)
        return moments


def update_moments(moments: PopulationMoments, vector: FeatureVector | Mapping[str, float]) -> PopulationMoments:
    moments.add(vector)
    return moments


_MIN_STD = 1e-12


def zscore(vector: FeatureVector | Mapping[str, float], moments: PopulationMoments) -> FeatureVector:
    """Standardize each value against the population moments.

    Features whose population has fewer than two observations or no
    spread map to 0.
    """
    out = {}
    for f in vector:
        if f not in moments.count:
            raise ValidationError(f"feature {f!r} missing from population moments")
        sd = moments.std(f)
        if moments.count[f] < 2 or sd < _MIN_STD:
            out[f] = 0.0
        else:
            out[f] = (vector[f] - moments.mean[f]) / sd
    return FeatureVector(out, zscored=True)
