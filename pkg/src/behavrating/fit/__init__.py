"""Statistical fits behind the weighted ratings: factors and logistic weights."""

from .cv import cross_validate, group_kfold
from .design import DesignMatrix
from .factors import FactorFit, extract_factors, fit_factors, oblimin
from .logit import (
    DEFAULT_LAMBDAS,
    RegressionModel,
    binary_objective,
    fit_binary_at,
    fit_binary_logit,
    fit_ordinal_at,
    fit_ordinal_logit,
    normalize_weights,
    ordinal_objective,
    proximal_gradient,
)
from .weights import fit_weights

__all__ = [
    "DEFAULT_LAMBDAS",
    "DesignMatrix",
    "FactorFit",
    "RegressionModel",
    "binary_objective",
    "cross_validate",
    "extract_factors",
    "fit_binary_at",
    "fit_binary_logit",
    "fit_factors",
    "fit_ordinal_at",
    "fit_ordinal_logit",
    "fit_weights",
    "group_kfold",
    "normalize_weights",
    "oblimin",
    "ordinal_objective",
    "proximal_gradient",
]
