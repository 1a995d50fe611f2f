"""End-to-end run: load, resolve or fit models, replay, report.

Every stage re-raises inner errors as ``PipelineError`` tagged with the
stage name, keeping the original exception as ``cause``.
"""

from __future__ import annotations

import logging
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from . import io
from .behavioral import FIXTURE_DATASETS, FactorModel, WeightModel, load_fixture
from .config import FIXTURE_PREFIX, RunConfig
from .core import MatchRecord, Mode
from .errors import BehavRatingError, PipelineError, ValidationError
from .evaluation import DesignRow, Replayer, evaluate_setup
from .features import available_features
from .fit import DesignMatrix, fit_factors, fit_weights
from .fit.logit import RegressionModel
from .ratings import SystemConfig

log = logging.getLogger(__name__)


@contextmanager
def stage(name: str) -> Iterator[None]:
    try:
        yield
    except PipelineError:
        raise
    except (BehavRatingError, OSError, ValueError, KeyError) as exc:
        raise PipelineError(name, exc) from exc


def log_features(header: io.LogHeader) -> tuple[str, ...]:
    return available_features(header.stats, header.modes)


# --- design matrix --------------------------------------------------------


def collect_design_rows(
    matches: Sequence[MatchRecord],
    features: Sequence[str],
    system: SystemConfig = SystemConfig(),
    zscore_mode: str = "incremental",
    snapshot_every: int = 1000,
) -> list[DesignRow]:
    """Player-match rows carrying each player's pre-match Z-scored features."""
    replayer = Replayer(
        (), features, system, zscore_mode=zscore_mode, snapshot_every=snapshot_every, collect_design=True
    )
    return replayer.run(matches).design_rows


def infer_kind(matches: Sequence[MatchRecord]) -> str:
    return "ordinal" if any(m.mode is Mode.FREE_FOR_ALL and m.team_count > 2 for m in matches) else "binary"


def design_matrix(rows: Sequence[DesignRow], features: Sequence[str], kind: str) -> DesignMatrix:
    """Rows of players with at least one prior game.

    ``binary`` keeps head-to-head rows of decided matches with the win flag
    as target; ``ordinal`` keeps every row with the team rank as target.
    """
    if kind == "binary":
        # a rank-1 row without a win is a shared first place
        keep = [r for r in rows if r.prior_games >= 1 and r.mode is Mode.HEAD_TO_HEAD and (r.won or r.rank != 1)]
        y = [r.won for r in keep]
    elif kind == "ordinal":
        keep = [r for r in rows if r.prior_games >= 1]
        y = [r.rank for r in keep]
    else:
        raise ValidationError(f"unknown target kind {kind!r}")
    if not keep:
        raise ValidationError(f"no usable {kind} observations in the log")
    X = np.array([[r.features[f] for f in features] for r in keep], dtype=float)
    return DesignMatrix(
        X,
        tuple(features),
        np.array(y, dtype=int),
        kind,
        np.array([r.match_id for r in keep], dtype=object),
        np.array([r.slot for r in keep], dtype=object),
    )


def drop_constant(matrix: DesignMatrix) -> DesignMatrix:
    sd = matrix.X.std(axis=0)
    keep = [c for c, s in zip(matrix.columns, sd) if s > 0]
    dropped = [c for c, s in zip(matrix.columns, sd) if not s > 0]
    if dropped:
        warnings.warn(f"dropping constant feature column(s) {dropped}", RuntimeWarning)
    return matrix.select(keep)


# --- models ---------------------------------------------------------------


@dataclass
class FittedModels:
    factors: FactorModel | None
    weights: WeightModel
    regression: RegressionModel


def fit_models(matrix: DesignMatrix, config: RunConfig) -> FittedModels:
    matrix = drop_constant(matrix)
    fo = config.factor_overrides
    factors = None
    if fo.enabled:
        factors = fit_factors(matrix, n_factors=fo.n_factors, gamma=fo.gamma, threshold=fo.threshold)
    regression, weights = fit_weights(matrix, factors, lambdas=config.lambdas, k=config.cv_folds, seed=config.seed)
    return FittedModels(factors, weights, regression)


def _resolve(spec: str | None, default_name: str, artifact_dir: Path | None, reader, fixture_index: int):
    if spec is not None and spec.startswith(FIXTURE_PREFIX):
        dataset = spec[len(FIXTURE_PREFIX) :]
        if dataset not in FIXTURE_DATASETS:
            raise ValidationError(f"unknown fixture dataset {dataset!r}")
        return load_fixture(dataset)[fixture_index]
    path = Path(spec or default_name)
    if not path.is_absolute() and artifact_dir is not None:
        path = artifact_dir / path
    if not path.exists():
        return None
    return reader(path)


def resolve_models(config: RunConfig, artifact_dir: Path | None) -> tuple[FactorModel | None, WeightModel | None]:
    """Load the factor and weight models a run without fitting needs."""
    weights = _resolve(config.weights, "weights.json", artifact_dir, io.read_weight_model, 1)
    factor_spec = config.factors
    if factor_spec is None and config.weights and config.weights.startswith(FIXTURE_PREFIX):
        factor_spec = config.weights
    factors = _resolve(factor_spec, "factors.json", artifact_dir, io.read_factor_model, 0)
    if "weighted" in config.sources and weights is None:
        where = config.weights or "weights.json"
        raise FileNotFoundError(f"weight artifact {where!r} not found (artifact dir: {artifact_dir})")
    return factors, weights


# --- run ------------------------------------------------------------------


@dataclass
class RunOutput:
    report: dict
    files: list[Path] = field(default_factory=list)


def run(
    config: RunConfig,
    log_path: str | Path,
    artifact_dir: str | Path | None = None,
    out_dir: str | Path | None = None,
) -> RunOutput:
    """Execute one configured run and write its report files to ``out_dir``."""
    from .report import build_report, write_report

    artifact_dir = Path(artifact_dir) if artifact_dir is not None else io.default_artifact_dir()
    with stage("load"):
        header, matches = io.read_log(log_path)
        if header.schema != config.schema:
            raise ValidationError(f"log schema {header.schema!r} does not match config schema {config.schema!r}")
        features = log_features(header)

    fitted = None
    if config.fit:
        with stage("fit"):
            kind = infer_kind(matches) if config.fit_kind == "auto" else config.fit_kind
            rows = collect_design_rows(matches, features, config.system, config.zscore_mode, config.snapshot_every)
            fitted = fit_models(design_matrix(rows, features, kind), config)
            factors, weights = fitted.factors, fitted.weights
            if artifact_dir is not None:
                artifact_dir.mkdir(parents=True, exist_ok=True)
                if factors is not None:
                    io.write_factor_model(artifact_dir / "factors.json", factors)
                io.write_weight_model(artifact_dir / "weights.json", weights)
    else:
        with stage("artifacts"):
            factors, weights = resolve_models(config, artifact_dir)

    with stage("replay"):
        replayer = Replayer(
            config.sources,
            features,
            config.system,
            weights=weights,
            factors=factors,
            seed=config.seed,
            zscore_mode=config.zscore_mode,
            snapshot_every=config.snapshot_every,
        )
        result = replayer.run(matches)
        scores = [s for setup in config.setups for s in evaluate_setup(result, setup)]

    with stage("report"):
        report = build_report(config, header, matches, features, scores, factors, weights, fitted)
        files = write_report(report, Path(out_dir), figures=config.figures) if out_dir is not None else []
    return RunOutput(report, files)
