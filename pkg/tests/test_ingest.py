import pytest

from behavrating.core import Mode
from behavrating.errors import IngestError, ValidationError
from behavrating.ingest import SCHEMAS, ingest, parse_timestamp

HALO_HEAD = "match_id,timestamp,gamertag,team,won,kills,deaths,assists,headshots,betrayals,suicides,melee_kills,grenade_kills,best_spree,time_alive"
PUBG_HEAD = "date,game_size,match_id,match_mode,party_size,player_assists,player_dbno,player_dist_ride,player_dist_walk,player_dmg,player_kills,player_name,player_survive_time,team_id,team_placement"


def write(tmp_path, lines):
    p = tmp_path / "raw.csv"
    p.write_text("\n".join(lines) + "\n")
    return p


def test_halo_slayer_reordered_by_timestamp(tmp_path):
    p = write(tmp_path, [
        HALO_HEAD,
        "g2,2000,ann,red,1,5,2,1,2,0,0,1,0,3,400",
        "g2,2000,bob,blue,0,2,5,0,1,1,0,0,1,1,300",
        "g1,1000,ann,blue,0,3,3,2,1,0,1,0,0,2,350",
        "g1,1000,cat,red,1,4,3,0,2,0,0,0,0,2,360",
    ])
    header, matches = ingest(p, "halo_slayer")
    assert [m.match_id for m in matches] == ["g1", "g2"]
    g2 = matches[1]
    assert g2.observed_ranks == {"blue": 2, "red": 1}
    ann = g2.teams[1].stats[0]
    assert ann.kills == 5 and ann.kill_assists == 1 and ann.longest_spree == 3 and ann.time_alive == 400.0
    assert ann.flag_steals is None and ann.damage_dealt is None
    assert "flag_steals" not in header.stats and "kills" in header.stats


def test_non_numeric_kill_count_names_line(tmp_path):
    p = write(tmp_path, [HALO_HEAD, "g1,1000,ann,blue,0,3,3,2,1,0,1,0,0,2,350", "g1,1000,cat,red,1,many,3,0,2,0,0,0,0,2,360"])
    with pytest.raises(IngestError, match="line 3") as err:
        ingest(p, "halo_slayer")
    assert err.value.line == 3


def test_unknown_schema(tmp_path):
    with pytest.raises(ValidationError, match="unknown schema"):
        ingest(write(tmp_path, [HALO_HEAD]), "quake")


def test_missing_required_column(tmp_path):
    with pytest.raises(IngestError, match="missing required column"):
        ingest(write(tmp_path, ["match_id,timestamp,gamertag,team,won"]), "halo_ctf")


def test_pubg_duo_team_size_and_deaths(tmp_path):
    p = write(tmp_path, [
        PUBG_HEAD,
        "2017-11-26T20:59:40+0000,6,m1,tpp,2,0,1,0,500,100,2,a1,600,1,1",
        "2017-11-26T20:59:40+0000,6,m1,tpp,2,1,0,10,400,50,1,a2,500,1,1",
        "2017-11-26T20:59:40+0000,6,m1,tpp,2,0,0,0,300,0,0,b1,100,2,3",
        "2017-11-26T20:59:40+0000,6,m1,tpp,2,0,0,0,200,0,0,b2,90,2,3",
        "2017-11-26T20:59:40+0000,6,m1,tpp,2,0,0,0,250,30,0,c1,200,3,2",
        "2017-11-26T20:59:40+0000,6,m1,tpp,2,0,1,0,260,20,1,c2,210,3,2",
        "2017-11-26T20:59:40+0000,6,m1,tpp,4,0,1,0,260,20,1,squad,210,9,1",
    ])
    header, (m,) = ingest(p, "pubg_duo")
    assert m.mode is Mode.FREE_FOR_ALL
    assert all(len(t.members) == 2 for t in m.teams)
    assert m.observed_ranks == {"1": 1, "2": 3, "3": 2}
    assert m.teams[0].stats[0].deaths == 0 and m.teams[1].stats[0].deaths == 1
    assert "deaths" in header.stats and header.modes == ("free_for_all",)


def test_pubg_duo_rejects_solo_team(tmp_path):
    p = write(tmp_path, [
        PUBG_HEAD,
        "2017-11-26T20:59:40+0000,6,m1,tpp,2,0,1,0,500,100,2,a1,600,1,1",
        "2017-11-26T20:59:40+0000,6,m1,tpp,2,0,0,0,300,0,0,b1,100,2,2",
        "2017-11-26T20:59:40+0000,6,m1,tpp,2,0,0,0,300,0,0,b2,100,2,2",
    ])
    with pytest.raises(IngestError, match="expected 2"):
        ingest(p, "pubg_duo")


def test_csgo_schema(tmp_path):
    p = write(tmp_path, [
        "match_id,timestamp,player,team,won,kills,deaths,assists,flash_assists,headshots,damage",
        "c1,2019-01-01T00:00:00,x,CT,1,20,10,3,1,8,2200.5",
        "c1,2019-01-01T00:00:00,y,T,0,10,20,2,0,4,1300",
    ])
    _, (m,) = ingest(p, "csgo")
    assert m.timestamp == 1546300800000
    assert m.teams[0].stats[0].flash_assists == 1 and m.teams[0].stats[0].damage_dealt == 2200.5


def test_team_outcome_disagreement(tmp_path):
    p = write(tmp_path, [HALO_HEAD, "g1,1,a,red,1,0,0,0,0,0,0,0,0,0,0", "g1,1,b,red,0,0,0,0,0,0,0,0,0,0,0", "g1,1,c,blue,0,0,0,0,0,0,0,0,0,0,0"])
    with pytest.raises(IngestError, match="disagree"):
        ingest(p, "halo_slayer")


def test_synthetic_schema(tmp_path):
    p = write(tmp_path, [
        "match_id,timestamp_ms,mode,player,team,rank,kills,deaths",
        "s1,10,free_for_all,a,t1,2,1,1",
        "s1,10,free_for_all,b,t2,1,3,0",
        "s1,10,free_for_all,c,t3,3,0,2",
    ])
    header, (m,) = ingest(p, "synthetic")
    assert m.observed_ranks == {"t1": 2, "t2": 1, "t3": 3}
    assert header.stats == ("kills", "deaths")


@pytest.mark.parametrize("text, ms", [("1000", 1000), ("1970-01-01T00:00:01Z", 1000), ("1970-01-01T00:00:02+0000", 2000)])
def test_parse_timestamp(text, ms):
    assert parse_timestamp(text) == ms


def test_schema_catalog():
    assert set(SCHEMAS) == {"halo_slayer", "halo_ctf", "csgo", "pubg_duo"}
    assert SCHEMAS["pubg_duo"].team_size == 2
