import json

import pytest

from behavrating import io
from behavrating.config import RunConfig, load_run_config
from behavrating.errors import PipelineError, ValidationError
from behavrating.evaluation import SetupSpec
from behavrating.pipeline import collect_design_rows, design_matrix, infer_kind, log_features, run
from behavrating.report import load_report, render_table
from behavrating.synth import SYNTH_STATS, SynthConfig, synth_matches

SOURCES = ("elo", "glicko", "trueskill", "mu:kd_ratio", "naive", "weighted")


@pytest.fixture(scope="module")
def small_log(tmp_path_factory):
    path = tmp_path_factory.mktemp("log") / "log.jsonl"
    cfg = SynthConfig(n_players=80, n_matches=800, seed=1)
    io.write_log(path, io.LogHeader("synthetic", SYNTH_STATS), synth_matches(cfg))
    return path


def test_fixture_weights_run_without_fit(small_log, tmp_path):
    cfg = RunConfig(sources=SOURCES, weights="fixture:halo_slayer", figures=False)
    out = run(cfg, small_log, tmp_path / "art", tmp_path / "rep")
    rows = out.report["results"]
    assert len(rows) == len(SOURCES) * 3
    assert {(r["setup"], r["source"]) for r in rows} == {(s.kind, src) for s in cfg.setups for src in SOURCES}
    assert "regression" not in out.report["models"]
    assert out.report["models"]["weights"]["provenance"] == "paper_fixture"
    assert not (tmp_path / "art").exists()


def test_missing_weights_is_stage_tagged(small_log, tmp_path):
    with pytest.raises(PipelineError) as err:
        run(RunConfig(sources=SOURCES), small_log, tmp_path / "empty")
    assert err.value.stage == "artifacts"
    assert str(err.value).startswith("[artifacts]")
    assert isinstance(err.value.cause, FileNotFoundError)


def test_fit_writes_artifacts(small_log, tmp_path):
    cfg = RunConfig(sources=("naive", "weighted"), fit=True, figures=True)
    out = run(cfg, small_log, tmp_path / "art", tmp_path / "rep")
    assert (tmp_path / "art" / "weights.json").exists() and (tmp_path / "art" / "factors.json").exists()
    assert (tmp_path / "rep" / "figures" / "scores_accuracy.png").exists()
    assert out.report["models"]["regression"]["kind"] == "binary"
    # a second run picks the refitted artifacts up from the directory
    again = run(RunConfig(sources=("weighted",), figures=False), small_log, tmp_path / "art")
    assert again.report["models"]["weights"] == out.report["models"]["weights"]


def test_report_carries_config_hash(small_log, tmp_path):
    cfg = RunConfig(sources=("elo",), setups=(SetupSpec.all_players(),), figures=False)
    out = run(cfg, small_log, None, tmp_path / "rep")
    rep = load_report(tmp_path / "rep")
    assert rep["config_hash"] == cfg.config_hash() == out.report["config_hash"]
    assert RunConfig.from_dict(rep["config"]).config_hash() == cfg.config_hash()
    table = (tmp_path / "rep" / "report.txt").read_text()
    assert table == render_table(rep) and "all_players" in table


def test_schema_mismatch_is_load_error(small_log):
    with pytest.raises(PipelineError) as err:
        run(RunConfig(schema="csgo", sources=("elo",)), small_log)
    assert err.value.stage == "load"


def test_unavailable_fixture_feature_is_replay_error(small_log):
    with pytest.raises(PipelineError) as err:
        run(RunConfig(sources=("weighted",), weights="fixture:csgo", figures=False), small_log)
    assert err.value.stage == "replay" and "flash_assist" in str(err.value)


def test_design_matrix_rows(small_log):
    header, matches = io.read_log(small_log)
    feats = log_features(header)
    rows = collect_design_rows(matches[:50], feats)
    assert len(rows) == 50 * 4
    m = design_matrix(rows, feats, infer_kind(matches))
    assert m.kind == "binary" and set(m.y.tolist()) == {0, 1}
    assert m.n_rows == sum(1 for r in rows if r.prior_games >= 1)


def test_config_round_trip_and_validation(tmp_path):
    cfg = RunConfig(seed=4, sources=("elo", "mu:accuracy"), setups=(SetupSpec.frequent(),))
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert load_run_config(path) == cfg
    path.write_text(json.dumps({"setups": ["all_players", "top_tier"]}))
    assert [s.kind for s in load_run_config(path).setups] == ["all_players", "top_tier"]
    for bad in ({"schema": "quake"}, {"sources": ["elo", "elo"]}, {"bogus": 1}, {"system": {"elo_k": -1.0}}, {"sources": ["mu:nope"]}):
        path.write_text(json.dumps(bad))
        with pytest.raises(ValidationError):
            load_run_config(path)
