import numpy as np
import pytest

from behavrating import io
from behavrating.core import validate_match
from behavrating.errors import ValidationError
from behavrating.synth import SynthConfig, latent_skills, synth_matches


def test_fixed_seed_identical_logs():
    cfg = SynthConfig(n_players=30, n_matches=50, seed=9)
    a = [io.encode_match(m) for m in synth_matches(cfg)]
    b = [io.encode_match(m) for m in synth_matches(cfg)]
    assert a == b
    assert a != [io.encode_match(m) for m in synth_matches(SynthConfig(n_players=30, n_matches=50, seed=10))]


def test_zero_noise_best_team_wins():
    cfg = SynthConfig(n_players=40, n_matches=200, mode="free_for_all", teams=4, team_size=2, noise=0.0, seed=2)
    skill = latent_skills(cfg)
    for m in synth_matches(cfg):
        best = max(m.teams, key=lambda t: max(skill[p] for p in t.members))
        assert m.observed_ranks[best.slot] == 1


def test_minimal_log():
    (m,) = synth_matches(SynthConfig(n_players=2, n_matches=1, team_size=1))
    assert validate_match(m) is m and m.team_count == 2


def test_stats_track_skill():
    cfg = SynthConfig(n_players=200, n_matches=3000, seed=4)
    skill = latent_skills(cfg)
    kills, deaths, ours = {}, {}, []
    for m in synth_matches(cfg):
        for t in m.teams:
            for p, s in zip(t.members, t.stats):
                kills[p] = kills.get(p, 0) + s.kills
                deaths[p] = deaths.get(p, 0) + s.deaths
    players = sorted(kills)
    kd = [kills[p] / max(1, deaths[p]) for p in players]
    assert np.corrcoef(kd, [skill[p] for p in players])[0, 1] > 0.5


@pytest.mark.parametrize(
    "kw", [{"n_players": 0}, {"teams": 3}, {"n_players": 3, "team_size": 2}, {"noise": -1.0}, {"skill_distribution": "cauchy"}]
)
def test_config_validation(kw):
    with pytest.raises(ValidationError):
        SynthConfig(**kw)
