import json

import pytest

from behavrating import io
from behavrating.cli import main

HALO_HEAD = "match_id,timestamp,gamertag,team,won,kills,deaths,assists,headshots,betrayals,suicides,melee_kills,grenade_kills,best_spree,time_alive"


@pytest.fixture
def synth_log(tmp_path):
    (tmp_path / "s.json").write_text(json.dumps({"n_players": 40, "n_matches": 300, "seed": 3}))
    log = tmp_path / "log.jsonl"
    assert main(["synth", "--config", str(tmp_path / "s.json"), "-o", str(log)]) == 0
    return log


def test_run_and_report(synth_log, tmp_path, capsys, monkeypatch):
    (tmp_path / "r.json").write_text(json.dumps({"fit": True, "figures": False}))
    monkeypatch.setenv("BEHAVRATING_ARTIFACTS", str(tmp_path / "art"))
    assert main(["run", "--config", str(tmp_path / "r.json"), "--log", str(synth_log), "-o", str(tmp_path / "rep")]) == 0
    assert (tmp_path / "art" / "weights.json").exists()
    table = capsys.readouterr().out
    assert "[accuracy, %]" in table and "weighted" in table
    assert main(["report", str(tmp_path / "rep"), "--format", "machine"]) == 0
    assert json.loads(capsys.readouterr().out)["format"] == "behavrating.report"
    assert main(["report", str(tmp_path / "rep")]) == 0
    assert capsys.readouterr().out == table


def test_fit_and_export(synth_log, tmp_path):
    assert main(["export-features", "--log", str(synth_log), "-o", str(tmp_path / "x.csv")]) == 0
    assert main(["fit", "factors", "--features", str(tmp_path / "x.csv"), "-o", str(tmp_path / "f.json")]) == 0
    assert main(["fit", "weights", "--log", str(synth_log), "--factors", str(tmp_path / "f.json"), "-o", str(tmp_path / "w.json")]) == 0
    assert io.read_weight_model(tmp_path / "w.json").provenance == "fitted"
    assert io.read_factor_model(tmp_path / "f.json").provenance == "fitted"


def test_ingest_command(tmp_path):
    raw = tmp_path / "raw.csv"
    raw.write_text(HALO_HEAD + "\ng1,1000,a,red,1,5,2,1,2,0,0,1,0,3,400\ng1,1000,b,blue,0,2,5,0,1,1,0,0,1,1,300\n")
    assert main(["ingest", "--schema", "halo_slayer", str(raw), "-o", str(tmp_path / "log.jsonl")]) == 0
    _, matches = io.read_log(tmp_path / "log.jsonl")
    assert len(matches) == 1


def test_exit_codes(synth_log, tmp_path, capsys):
    raw = tmp_path / "raw.csv"
    raw.write_text(HALO_HEAD + "\ng1,1000,a,red,1,x,2,1,2,0,0,1,0,3,400\n")
    assert main(["ingest", "--schema", "halo_slayer", str(raw), "-o", str(tmp_path / "o")]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["ingest", "--schema", "halo_slayer", str(tmp_path / "absent.csv"), "-o", str(tmp_path / "o")]) == 4
    assert main(["run", "--log", str(synth_log), "--artifacts", str(tmp_path / "none"), "-o", str(tmp_path / "rep")]) == 4
    assert "[artifacts]" in capsys.readouterr().err
    (tmp_path / "bad.json").write_text('{"schema": "quake"}')
    assert main(["run", "--config", str(tmp_path / "bad.json"), "--log", str(synth_log), "-o", str(tmp_path / "rep")]) == 2


def test_non_convergence_exit_code(monkeypatch, synth_log, tmp_path):
    from behavrating.errors import ConvergenceError
    import behavrating.fit as fit_pkg

    def boom(*a, **k):
        raise ConvergenceError("did not converge")

    monkeypatch.setattr(fit_pkg, "fit_weights", boom)
    code = main(["fit", "weights", "--log", str(synth_log), "--no-factors", "-o", str(tmp_path / "w.json")])
    assert code == 3


def test_outputs_create_directories_and_verbose_anywhere(synth_log, tmp_path, caplog):
    out = tmp_path / "nested" / "deeper" / "f.json"
    assert main(["fit", "factors", "--log", str(synth_log), "-o", str(out), "-v"]) == 0
    assert out.exists()
    assert main(["-v", "export-features", "--log", str(synth_log), "-o", str(tmp_path / "x" / "x.csv")]) == 0
