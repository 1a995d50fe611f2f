"""Timestamp-ordered replay: predict every match from prior state, then update.

One replay serves all three evaluation setups. The setups only decide which
matches are scored, and predictions never depend on the setup, so scoring a
setup on the stored records equals a dedicated second pass over the log.
"""

from __future__ import annotations

import logging
import warnings
import zlib
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .behavioral import FactorModel, WeightModel, naive_hybrid, weighted_rating, single_factor
from .core import MatchRecord, Mode, PlayerId
from .errors import ValidationError
from .features import (
    FEATURES,
    FeatureVector,
    MatchContext,
    PlayerProfile,
    PopulationMoments,
    derive_features,
    update_profile,
    zscore,
)
from .metrics import PredictionRecord, accuracy, mean_ndcg, predict_ranks
from .ratings import EloSystem, GlickoSystem, SystemConfig, TrueSkillSystem, team_rating
from .ratings.trueskill import TrueSkillState, conservative

log = logging.getLogger(__name__)

CLASSICAL = ("elo", "glicko", "trueskill")
SETUP_KINDS = ("all_players", "top_tier", "frequent")


def parse_source(source: str) -> tuple[str, str | None]:
    """Split a source id into (family, argument), e.g. ``mu:kd_ratio``."""
    if source in CLASSICAL or source in ("naive", "weighted"):
        return source, None
    if source.startswith("mu:") and source[3:] in FEATURES:
        return "single", source[3:]
    raise ValidationError(f"unknown rating source {source!r}")


@dataclass(frozen=True)
class SetupSpec:
    kind: str = "all_players"
    top_n: int = 50
    min_games: int = 10
    window: int = 10

    def __post_init__(self):
        if self.kind not in SETUP_KINDS:
            raise ValidationError(f"unknown setup {self.kind!r}")
        if min(self.top_n, self.min_games, self.window) <= 0:
            raise ValidationError("setup parameters must be positive")

    @classmethod
    def all_players(cls) -> SetupSpec:
        return cls("all_players")

    @classmethod
    def top_tier(cls, top_n: int = 50, min_games: int = 10, window: int = 10) -> SetupSpec:
        return cls("top_tier", top_n, min_games, window)

    @classmethod
    def frequent(cls, min_games: int = 100, window: int = 100) -> SetupSpec:
        return cls("frequent", 1, min_games, window)


DEFAULT_SETUPS = (SetupSpec.all_players(), SetupSpec.top_tier(), SetupSpec.frequent())


def select_top_tier(
    states: Mapping[PlayerId, TrueSkillState],
    profiles: Mapping[PlayerId, PlayerProfile],
    top_n: int = 50,
    min_games: int = 10,
    window: int = 10,
) -> tuple[set[PlayerId], int]:
    """Top ``top_n`` by final conservative TrueSkill among players with more than ``min_games`` games."""
    qualified = [p for p, prof in profiles.items() if prof.games_played > min_games]
    default = TrueSkillState()
    qualified.sort(key=lambda p: (-conservative(states.get(p, default)), p))
    return set(qualified[:top_n]), window


def select_frequent(profiles: Mapping[PlayerId, PlayerProfile], min_games: int = 100, window: int = 100) -> tuple[set[PlayerId], int]:
    chosen = {p for p, prof in profiles.items() if prof.games_played > min_games}
    if not chosen:
        warnings.warn(f"no player has more than {min_games} games; frequent setup is empty", RuntimeWarning)
    return chosen, window


@dataclass
class MatchEntry:
    match_id: str
    mode: Mode
    prior_games: dict[PlayerId, int]


@dataclass
class DesignRow:
    match_id: str
    timestamp: int
    mode: Mode
    slot: str
    player: PlayerId
    prior_games: int
    won: int
    rank: int
    team_count: int
    features: dict[str, float]


@dataclass
class ReplayResult:
    sources: tuple[str, ...]
    entries: list[MatchEntry] = field(default_factory=list)
    records: dict[str, list[PredictionRecord]] = field(default_factory=dict)
    trueskill: dict[PlayerId, TrueSkillState] = field(default_factory=dict)
    profiles: dict[PlayerId, PlayerProfile] = field(default_factory=dict)
    design_rows: list[DesignRow] = field(default_factory=list)


class Replayer:
    """Stateful replay engine; ``step`` can be called across several streams.

    Z-score moments cover the current raw feature vectors of every player
    with at least one game. ``zscore_mode="incremental"`` keeps them exact
    after each match by retracting a player's old vector and adding the new
    one; ``"snapshot"`` freezes them and rebuilds every ``snapshot_every``
    matches. Players without games always get the all-zero vector.
    """

    def __init__(
        self,
        sources: Sequence[str],
        features: Sequence[str] = FEATURES,
        system_config: SystemConfig = SystemConfig(),
        weights: WeightModel | None = None,
        factors: FactorModel | None = None,
        seed: int = 0,
        zscore_mode: str = "incremental",
        snapshot_every: int = 1000,
        collect_design: bool = False,
    ):
        self.sources = tuple(sources)
        self.features = tuple(features)
        self.weights = weights
        self.factors = factors
        self.seed = seed
        self.zscore_mode = zscore_mode
        self.snapshot_every = snapshot_every
        self.collect_design = collect_design
        if zscore_mode not in ("incremental", "snapshot"):
            raise ValidationError(f"unknown zscore mode {zscore_mode!r}")
        if zscore_mode == "snapshot" and snapshot_every <= 0:
            raise ValidationError("snapshot_every must be positive")
        self._check_sources()

        self.elo = EloSystem(system_config)
        self.glicko = GlickoSystem(system_config)
        self.trueskill = TrueSkillSystem(system_config)
        self.profiles: dict[PlayerId, PlayerProfile] = {}
        self.raw: dict[PlayerId, FeatureVector] = {}
        self.moments = PopulationMoments(self.features)
        self.rngs = {s: np.random.default_rng([seed, zlib.crc32(s.encode())]) for s in self.sources}
        self.result = ReplayResult(self.sources, records={s: [] for s in self.sources})
        self._last_key: tuple[int, str] | None = None
        self._since_snapshot = 0

    def _check_sources(self) -> None:
        for s in self.sources:
            family, arg = parse_source(s)
            if family == "single" and arg not in self.features:
                raise ValidationError(f"source {s!r}: feature {arg!r} unavailable in this dataset")
            if family == "weighted":
                if self.weights is None:
                    raise ValidationError("source 'weighted' needs a weight model")
                factor_names = set(self.factors.names) if self.factors else set()
                for term in self.weights.weights:
                    if term in factor_names:
                        needed = self.factors.loadings(term)
                    else:
                        needed = [term]
                    missing = [f for f in needed if f not in self.features]
                    if missing:
                        raise ValidationError(f"weighted term {term!r} needs unavailable feature(s) {missing}")

    # -- per-player state --------------------------------------------------

    def games(self, player: PlayerId) -> int:
        prof = self.profiles.get(player)
        return prof.games_played if prof else 0

    def zvector(self, player: PlayerId) -> FeatureVector:
        raw = self.raw.get(player)
        if raw is None:
            return FeatureVector({f: 0.0 for f in self.features}, zscored=True)
        return zscore(raw, self.moments)

    def _behavioral(self, family: str, arg: str | None, z: FeatureVector) -> float:
        if family == "single":
            return single_factor(z, arg)
        if family == "naive":
            return naive_hybrid(z)
        return weighted_rating(z, self.weights, self.factors)

    def _player_value(self, source: str, player: PlayerId, zcache: dict[PlayerId, FeatureVector]) -> float:
        family, arg = parse_source(source)
        if family == "elo":
            return self.elo.value(player)
        if family == "glicko":
            return self.glicko.value(player)
        if family == "trueskill":
            return self.trueskill.value(player)
        if player not in zcache:
            zcache[player] = self.zvector(player)
        return self._behavioral(family, arg, zcache[player])

    # -- replay ------------------------------------------------------------

    def step(self, match: MatchRecord) -> None:
        key = match.sort_key()
        if self._last_key is not None and key < self._last_key:
            raise ValidationError(f"match {match.match_id} is out of timestamp order")
        self._last_key = key

        prior = {p: self.games(p) for p in match.players()}
        self.result.entries.append(MatchEntry(match.match_id, match.mode, prior))
        zcache: dict[PlayerId, FeatureVector] = {}
        for source in self.sources:
            values = {
                t.slot: team_rating([self._player_value(source, p, zcache) for p in t.members]) for t in match.teams
            }
            predicted = predict_ranks(values, self.rngs[source])
            self.result.records[source].append(
                PredictionRecord(match.match_id, source, match.mode, predicted, match.observed_ranks, values, self.seed)
            )

        if self.collect_design:
            self._collect(match, prior, zcache)
        self._update(match)

    def _collect(self, match: MatchRecord, prior: dict[PlayerId, int], zcache: dict[PlayerId, FeatureVector]) -> None:
        draw = match.is_draw
        for team in match.teams:
            rank = match.observed_ranks[team.slot]
            for p in team.members:
                z = zcache.get(p) or self.zvector(p)
                self.result.design_rows.append(
                    DesignRow(
                        match.match_id,
                        match.timestamp,
                        match.mode,
                        team.slot,
                        p,
                        prior[p],
                        int(rank == 1 and not draw),
                        rank,
                        match.team_count,
                        dict(z.values),
                    )
                )

    def _update(self, match: MatchRecord) -> None:
        self.elo.update(match)
        self.glicko.update(match)
        self.trueskill.update(match)
        draw = match.is_draw
        incremental = self.zscore_mode == "incremental"
        for team in match.teams:
            rank = match.observed_ranks[team.slot]
            ctx = MatchContext(rank, match.team_count, rank == 1 and not draw, match.mode)
            for p, stats in zip(team.members, team.stats):
                prof = self.profiles.setdefault(p, PlayerProfile())
                update_profile(prof, stats, ctx)
                new = derive_features(prof, self.features)
                if incremental:
                    old = self.raw.get(p)
                    if old is not None:
                        self.moments.remove(old)
                    self.moments.add(new)
                self.raw[p] = new
        if not incremental:
            self._since_snapshot += 1
            if self._since_snapshot >= self.snapshot_every:
                self.refresh_moments()

    def refresh_moments(self) -> None:
        """Recompute the moments exactly from every current raw vector."""
        self.moments = PopulationMoments.from_vectors(self.raw.values(), self.features)
        self._since_snapshot = 0

    def run(self, matches: Iterable[MatchRecord]) -> ReplayResult:
        for m in matches:
            self.step(m)
        return self.finish()

    def finish(self) -> ReplayResult:
        self.result.trueskill = dict(self.trueskill.states)
        self.result.profiles = self.profiles
        return self.result


@dataclass(frozen=True)
class SetupScore:
    source: str
    setup: str
    metric: str
    value: float | None
    n_matches: int


def scored_matches(result: ReplayResult, setup: SetupSpec) -> list[int]:
    """Indices of entries a setup scores; each match counts once."""
    if setup.kind == "all_players":
        return list(range(len(result.entries)))
    if setup.kind == "top_tier":
        chosen, window = select_top_tier(result.trueskill, result.profiles, setup.top_n, setup.min_games, setup.window)
    else:
        chosen, window = select_frequent(result.profiles, setup.min_games, setup.window)
    return [
        i
        for i, entry in enumerate(result.entries)
        if any(p in chosen and g < window for p, g in entry.prior_games.items())
    ]


def evaluate_setup(result: ReplayResult, setup: SetupSpec) -> list[SetupScore]:
    """Accuracy (head-to-head) or mean NDCG (free-for-all) per source.

    One row per source and per mode present in the log; the value is
    ``None`` when the setup leaves nothing to score.
    """
    idx = scored_matches(result, setup)
    if not idx:
        warnings.warn(f"setup {setup.kind!r} selects no matches", RuntimeWarning)
    modes = [m for m in (Mode.HEAD_TO_HEAD, Mode.FREE_FOR_ALL) if any(e.mode is m for e in result.entries)]
    out = []
    for source in result.sources:
        recs = [result.records[source][i] for i in idx]
        for mode in modes:
            if mode is Mode.HEAD_TO_HEAD:
                usable = [r for r in recs if r.mode is mode and not r.is_draw]
                metric, value = "accuracy", accuracy(usable) if usable else None
            else:
                usable = [r for r in recs if r.mode is mode]
                metric, value = "ndcg", mean_ndcg(usable) if usable else None
            out.append(SetupScore(source, setup.kind, metric, value, len(usable)))
    return out


def run_replay(
    matches: Sequence[MatchRecord],
    sources: Sequence[str],
    setup: SetupSpec = SetupSpec.all_players(),
    seed: int = 0,
    **kwargs,
) -> list[SetupScore]:
    """Replay ``matches`` (already in timestamp order) and score one setup."""
    result = Replayer(sources, seed=seed, **kwargs).run(matches)
    return evaluate_setup(result, setup)
