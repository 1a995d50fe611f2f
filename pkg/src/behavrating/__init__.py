"""Classical and behavioral player ratings evaluated by timestamp-ordered replay."""

from .behavioral import (
    FactorModel,
    WeightModel,
    factor_score,
    load_fixture,
    naive_hybrid,
    weighted_rating,
    single_factor,
    weighted_hybrid,
)
from .core import MatchRecord, Mode, RawMatchStats, Team, validate_match
from .errors import (
    BehavRatingError,
    ConvergenceError,
    FitError,
    IngestError,
    PipelineError,
    ValidationError,
)
from .evaluation import Replayer, SetupSpec, evaluate_setup, run_replay
from .features import FEATURES, FeatureVector, PlayerProfile, derive_features, zscore
from .metrics import accuracy, mean_ndcg, ndcg, predict_ranks
from .ratings import SystemConfig

__version__ = "0.1.0"

__all__ = [
    "BehavRatingError",
    "ConvergenceError",
    "FEATURES",
    "FactorModel",
    "FeatureVector",
    "FitError",
    "IngestError",
    "MatchRecord",
    "Mode",
    "PipelineError",
    "PlayerProfile",
    "RawMatchStats",
    "Replayer",
    "SetupSpec",
    "SystemConfig",
    "Team",
    "ValidationError",
    "WeightModel",
    "accuracy",
    "derive_features",
    "evaluate_setup",
    "factor_score",
    "load_fixture",
    "mean_ndcg",
    "naive_hybrid",
    "ndcg",
    "weighted_rating",
    "predict_ranks",
    "run_replay",
    "single_factor",
    "validate_match",
    "weighted_hybrid",
    "zscore",
]
