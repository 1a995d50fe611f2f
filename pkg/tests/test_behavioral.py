import json
from decimal import Decimal
from importlib import resources

import pytest
from hypothesis import given
from hypothesis import strategies as st

from behavrating.behavioral import (
    FIXTURE_DATASETS,
    FactorModel,
    WeightModel,
    factor_score,
    load_fixture,
    naive_hybrid,
    weighted_rating,
    single_factor,
    term_values,
    weighted_hybrid,
)
from behavrating.errors import ValidationError
from behavrating.features import FEATURES, FeatureVector


def test_single_factor():
    assert single_factor(FeatureVector({f: 0.0 for f in FEATURES}, True), "kd_ratio") == 0.0
    assert single_factor({"kd_ratio": 1.3}, "kd_ratio") == 1.3
    with pytest.raises(KeyError):
        single_factor({"kd_ratio": 1.3}, "not_a_feature")


def test_naive_hybrid():
    assert naive_hybrid({f: 0.0 for f in FEATURES}) == 0.0
    assert naive_hybrid({"a": 0.5, "b": -0.2, "c": 0.1}) == pytest.approx(0.4)
    assert naive_hybrid({"a": -2.5}) == -2.5


def test_factor_score_examples():
    factors, _ = load_fixture("csgo")
    assert factor_score({"kill_assist": 1.0, "flash_assist": 0.0}, factors, "support") == 0.669590
    assert factor_score({"kill_assist": 0.0, "flash_assist": 0.0}, factors, "support") == 0.0
    halo, _ = load_fixture("halo_slayer")
    ones = {f: 1.0 for f in halo.loadings("skill")}
    assert factor_score(ones, halo, "skill") == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(KeyError):
        factor_score({"kill_assist": 1.0}, factors, "support")


def test_weighted_hybrid_examples():
    _, w = load_fixture("csgo")
    value = weighted_hybrid({"skill": 1.0, "experience": 0.5, "support": 0.2}, w)
    assert value == pytest.approx(0.552309 + 0.138350 + 0.034198, abs=1e-6)
    assert weighted_hybrid({t: 0.0 for t in w.weights}, w) == 0.0
    _, halo = load_fixture("halo_slayer")
    terms = {t: 0.0 for t in halo.weights}
    terms["betrayal"] = 1.0
    assert weighted_hybrid(terms, halo) == -0.065018
    with pytest.raises(KeyError):
        weighted_hybrid({"skill": 1.0}, w)


@pytest.mark.parametrize("dataset", FIXTURE_DATASETS)
def test_fixture_sums_exact(dataset):
    raw = json.loads(resources.files("behavrating").joinpath(f"fixtures/{dataset}.json").read_text(), parse_float=Decimal)
    for f in raw["factors"]["factors"]:
        assert abs(sum(abs(v) for v in f["loadings"].values()) - 1) <= Decimal("1e-6")
    assert abs(sum(abs(v) for v in raw["weights"]["weights"].values()) - 1) <= Decimal("1e-6")
    assert raw["factors"]["provenance"] == raw["weights"]["provenance"] == "paper_fixture"


def test_halo_slayer_weight_sum():
    _, w = load_fixture("halo_slayer")
    assert sorted(abs(v) for v in w.weights.values()) == sorted([0.330654, 0.320160, 0.249425, 0.065018, 0.034743])


def test_model_validation():
    with pytest.raises(ValidationError):
        FactorModel((("f", {"a": 0.5, "b": 0.2}),))
    with pytest.raises(ValidationError):
        FactorModel((("f", {"a": 0.5, "b": 0.5}), ("g", {"a": 1.0})))
    with pytest.raises(ValidationError):
        WeightModel({"a": 0.7, "b": 0.7})
    with pytest.raises(ValidationError):
        WeightModel({"a": 1.0}, provenance="guess")


@pytest.mark.parametrize("dataset", FIXTURE_DATASETS)
def test_models_round_trip(dataset):
    factors, weights = load_fixture(dataset)
    assert FactorModel.from_dict(factors.to_dict()) == factors
    assert WeightModel.from_dict(weights.to_dict()) == weights


vals = st.floats(-5, 5, allow_nan=False)


@given(st.lists(vals, min_size=6, max_size=6), st.lists(vals, min_size=6, max_size=6), st.floats(-3, 3))
def test_ratings_are_linear(xs, ys, alpha):
    factors, weights = load_fixture("csgo")
    feats = ["damage_dealt", "kd_ratio", "accuracy", "winning_rate", "kill_assist", "flash_assist"]
    x = dict(zip(feats, xs)) | {"experience": xs[0]}
    y = dict(zip(feats, ys)) | {"experience": ys[0]}
    xy = {k: x[k] + y[k] for k in x}
    ax = {k: alpha * x[k] for k in x}
    for fn in (naive_hybrid, lambda v: weighted_rating(v, weights, factors), lambda v: single_factor(v, "kd_ratio")):
        assert fn(xy) == pytest.approx(fn(x) + fn(y), abs=1e-9)
        assert fn(ax) == pytest.approx(alpha * fn(x), abs=1e-9)


@given(vals)
def test_single_term_weight_equals_single_factor(v):
    assert weighted_hybrid({"kd_ratio": v}, WeightModel({"kd_ratio": 1.0})) == single_factor({"kd_ratio": v}, "kd_ratio")


def test_term_values_mix_factors_and_unabsorbed_features():
    factors, weights = load_fixture("halo_ctf")
    vec = {f: 0.1 for f in FEATURES}
    terms = term_values(vec, list(weights.weights), factors)
    assert set(terms) == set(weights.weights)
    assert terms["skill"] == pytest.approx(0.1)
    assert weighted_rating(vec, weights, factors) == pytest.approx(sum(w * terms[t] for t, w in weights.weights.items()))
