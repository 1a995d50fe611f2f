from __future__ import annotations

from typing import Sequence

from ..behavioral import FactorModel, WeightModel
from .design import DesignMatrix
from .logit import DEFAULT_LAMBDAS, RegressionModel, fit_binary_logit, fit_ordinal_logit, normalize_weights


def fit_weights(
    matrix: DesignMatrix,
    factors: FactorModel | None = None,
    lambdas: Sequence[float] = DEFAULT_LAMBDAS,
    k: int = 5,
    seed: int = 0,
) -> tuple[RegressionModel, WeightModel]:
    """Fit outcome weights over factor scores plus unabsorbed features, then normalize."""
    terms = matrix.with_terms(factors)
    fit = fit_binary_logit if matrix.kind == "binary" else fit_ordinal_logit
    model = fit(terms, lambdas=lambdas, k=k, seed=seed)
    weights = normalize_weights(model)
    weights.metadata["terms"] = list(terms.columns)
    return model, weights
