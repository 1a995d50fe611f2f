"""Classical rating systems used as baselines and for top-tier selection."""

from .common import team_rating
from .config import SystemConfig
from .elo import EloState, elo_expected, elo_update
from .glicko import GlickoState, glicko_expected, glicko_period_update, glicko_update, inflate_rd
from .systems import EloSystem, GlickoSystem, RatingSystem, TrueSkillSystem
from .trueskill import TrueSkillState, conservative, trueskill_update

__all__ = [
    "SystemConfig",
    "team_rating",
    "EloState",
    "elo_expected",
    "elo_update",
    "GlickoState",
    "glicko_expected",
    "glicko_period_update",
    "glicko_update",
    "inflate_rd",
    "TrueSkillState",
    "conservative",
    "trueskill_update",
    "RatingSystem",
    "EloSystem",
    "GlickoSystem",
    "TrueSkillSystem",
]
