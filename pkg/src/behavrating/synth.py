"""Deterministic synthetic match logs driven by latent player skill.

Each player draws a latent skill, a support tendency and an activity
weight. Match rosters are sampled in proportion to activity. Per-match
statistics are noisy monotone functions of the latent traits: kills,
headshots, damage, sprees and survival rise with skill, deaths fall, and
betrayals and suicides fall with skill. Assists follow the support trait and
walking distance is pure noise. A team's strength is its best member's
skill plus Gaussian noise; teams are ranked by strength.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import MatchRecord, Mode, RawMatchStats, Team, competition_ranks
from .errors import ValidationError

SYNTH_STATS = (
    "kills",
    "deaths",
    "headshots",
    "melee_kills",
    "grenade_kills",
    "longest_spree",
    "kill_assists",
    "betrayals",
    "suicides",
    "damage_dealt",
    "time_alive",
    "walk_distance",
)


@dataclass(frozen=True)
class SynthConfig:
    n_players: int = 500
    n_matches: int = 5000
    mode: str = "head_to_head"
    teams: int = 2
    team_size: int = 2
    noise: float = 0.5
    skill_distribution: str = "normal"
    activity_sigma: float = 1.0
    start_ms: int = 1_500_000_000_000
    spacing_ms: int = 60_000
    seed: int = 0

    def __post_init__(self):
        for name in ("n_players", "n_matches", "teams", "team_size"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.noise < 0 or self.activity_sigma < 0:
            raise ValidationError("noise parameters must be non-negative")
        if self.skill_distribution not in ("normal", "uniform"):
            raise ValidationError(f"unknown skill distribution {self.skill_distribution!r}")
        mode = Mode(self.mode)
        if mode is Mode.HEAD_TO_HEAD and self.teams != 2:
            raise ValidationError("head_to_head needs exactly 2 teams")
        if self.teams < 2:
            raise ValidationError("a match needs at least 2 teams")
        if self.teams * self.team_size > self.n_players:
            raise ValidationError(f"{self.teams}x{self.team_size} roster needs more than {self.n_players} players")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Population:
    ids: tuple[str, ...]
    skill: np.ndarray
    support: np.ndarray
    activity: np.ndarray


def draw_population(cfg: SynthConfig, rng: np.random.Generator) -> Population:
    width = len(str(cfg.n_players - 1))
    ids = tuple(f"p{i:0{width}d}" for i in range(cfg.n_players))
    if cfg.skill_distribution == "normal":
        skill = rng.standard_normal(cfg.n_players)
    else:
        # unit variance
        skill = rng.uniform(-np.sqrt(3), np.sqrt(3), cfg.n_players)
    support = rng.standard_normal(cfg.n_players)
    activity = rng.lognormal(0.0, cfg.activity_sigma, cfg.n_players)
    return Population(ids, skill, support, activity / activity.sum())


def draw_stats(skill: float, support: float, rng: np.random.Generator) -> RawMatchStats:
    kills = int(rng.poisson(np.exp(1.6 + 0.35 * skill)))
    deaths = int(rng.poisson(np.exp(1.6 - 0.3 * skill)))
    return RawMatchStats(
        kills=kills,
        deaths=deaths,
        headshots=int(rng.binomial(kills, 1.0 / (1.0 + np.exp(0.5 - 0.6 * skill)))),
        melee_kills=int(rng.poisson(np.exp(-0.5 + 0.3 * skill))),
        grenade_kills=int(rng.poisson(np.exp(-0.3 + 0.3 * skill))),
        longest_spree=int(rng.poisson(np.exp(0.3 + 0.35 * skill))),
        kill_assists=int(rng.poisson(np.exp(0.7 + 0.4 * support))),
        betrayals=int(rng.poisson(np.exp(-2.0 - 0.5 * skill))),
        suicides=int(rng.poisson(np.exp(-2.0 - 0.4 * skill))),
        damage_dealt=float(max(0.0, 100.0 * kills + rng.normal(150.0 + 40.0 * skill, 60.0))),
        time_alive=float(max(0.0, rng.normal(600.0 + 60.0 * skill, 90.0))),
        walk_distance=float(rng.gamma(4.0, 500.0)),
    )


def synth_matches(cfg: SynthConfig) -> list[MatchRecord]:
    rng = np.random.default_rng(cfg.seed)
    pop = draw_population(cfg, rng)
    mode = Mode(cfg.mode)
    roster = cfg.teams * cfg.team_size
    width = len(str(cfg.n_matches - 1))
    out = []
    for m in range(cfg.n_matches):
        picked = rng.choice(cfg.n_players, size=roster, replace=False, p=pop.activity)
        groups = picked.reshape(cfg.teams, cfg.team_size)
        strength = pop.skill[groups].max(axis=1) + cfg.noise * rng.standard_normal(cfg.teams)
        ranks = competition_ranks(strength.tolist(), higher_is_better=True)
        teams = tuple(
            Team(
                f"t{t}",
                tuple(pop.ids[i] for i in members),
                tuple(draw_stats(pop.skill[i], pop.support[i], rng) for i in members),
            )
            for t, members in enumerate(groups)
        )
        out.append(
            MatchRecord(
                match_id=f"m{m:0{width}d}",
                timestamp=cfg.start_ms + m * cfg.spacing_ms,
                mode=mode,
                teams=teams,
                observed_ranks={team.slot: r for team, r in zip(teams, ranks)},
            )
        )
    return out


def latent_skills(cfg: SynthConfig) -> dict[str, float]:
    """Latent skill per player id, for diagnostics and tests."""
    pop = draw_population(cfg, np.random.default_rng(cfg.seed))
    return dict(zip(pop.ids, pop.skill.tolist()))
