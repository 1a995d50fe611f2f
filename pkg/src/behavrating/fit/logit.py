"""L1-penalized binary and proportional-odds logistic regression.

Both fits minimize ``mean negative log-likelihood + lam * ||w||_1`` with a
deterministic proximal gradient method: Barzilai-Borwein trial steps,
backtracking until the quadratic upper bound holds, soft-thresholding on
the weights only (intercepts and cutpoints are unpenalized). The sufficient
decrease test makes the penalized objective monotone across iterations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit, log_expit

from ..behavioral import WeightModel
from ..errors import ConvergenceError, FitError, ValidationError
from .design import DesignMatrix

DEFAULT_LAMBDAS = (0.001, 0.01, 0.1, 1.0)


@dataclass
class SolverResult:
    x: np.ndarray
    objective: float
    history: list[float]
    iterations: int
    converged: bool


@dataclass
class RegressionModel:
    kind: str
    columns: tuple[str, ...]
    weights: np.ndarray
    intercept: float | None = None
    cutpoints: np.ndarray | None = None
    levels: np.ndarray | None = None
    lam: float = 0.0
    loglik: float = float("nan")
    cv_score: float | None = None
    cv_scores: dict[float, float] = field(default_factory=dict)
    iterations: int = 0
    history: list[float] = field(default_factory=list)

    def weight_map(self, nonzero_only: bool = True) -> dict[str, float]:
        return {c: float(w) for c, w in zip(self.columns, self.weights) if w != 0 or not nonzero_only}

    def linear_predictor(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.weights


def _soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def proximal_gradient(
    fun: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x0: np.ndarray,
    penalized: np.ndarray,
    lam: float,
    max_iter: int = 10_000,
    tol: float = 1e-8,
) -> SolverResult:
    """Minimize ``fun(x) + lam * ||x[penalized]||_1``.

    ``history`` records the penalized objective negated (i.e. the penalized
    log-likelihood per row) at every accepted iterate. Stops when the norm
    of the proximal gradient mapping drops below ``tol``.
    """
    x = np.array(x0, dtype=float)
    pen = np.asarray(penalized, dtype=bool)

    def prox(v: np.ndarray, t: float) -> np.ndarray:
        out = v.copy()
        out[pen] = _soft_threshold(v[pen], t * lam)
        return out

    f, g = fun(x)
    F = f + lam * np.abs(x[pen]).sum()
    history = [-F]
    step = 1.0
    for it in range(1, max_iter + 1):
        while True:
            z = prox(x - step * g, step)
            d = z - x
            fz, gz = fun(z)
            if fz <= f + g @ d + (d @ d) / (2 * step):
                break
            step *= 0.5
            if step < 1e-20:
                return SolverResult(x, F, history, it, True)
        mapping_norm = np.linalg.norm(d) / step
        Fz = fz + lam * np.abs(z[pen]).sum()
        if Fz > F:
            # only reachable through rounding at the optimum
            return SolverResult(x, F, history, it, mapping_norm < 1e-6)
        s, yv = d, gz - g
        x, f, g, F = z, fz, gz, Fz
        history.append(-F)
        if mapping_norm < tol:
            return SolverResult(x, F, history, it, True)
        sy = s @ yv
        step = float(np.clip((s @ s) / sy, 1e-10, 1e10)) if sy > 0 else step * 2.0
    raise ConvergenceError(f"proximal gradient did not converge in {max_iter} iterations")


# --- binary ---------------------------------------------------------------


def binary_objective(params: np.ndarray, X: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean negative log-likelihood and gradient; ``params = [w..., intercept]``."""
    w, b = params[:-1], params[-1]
    linpred = X @ w + b
    sign = 2.0 * y - 1.0
    nll = -np.mean(log_expit(sign * linpred))
    resid = expit(linpred) - y
    grad = np.empty_like(params)
    grad[:-1] = X.T @ resid / len(y)
    grad[-1] = resid.mean()
    return float(nll), grad


def _fit_binary(X: np.ndarray, y: np.ndarray, lam: float, x0: np.ndarray | None = None, **solver) -> SolverResult:
    p = X.shape[1]
    if x0 is None:
        prior = np.clip(y.mean(), 1e-6, 1 - 1e-6)
        x0 = np.zeros(p + 1)
        x0[-1] = np.log(prior / (1 - prior))
    penalized = np.r_[np.ones(p, dtype=bool), False]
    return proximal_gradient(lambda v: binary_objective(v, X, y), x0, penalized, lam, **solver)


# --- ordinal --------------------------------------------------------------


def cutpoints_from_params(theta0: float, log_gaps: np.ndarray) -> np.ndarray:
    return theta0 + np.r_[0.0, np.cumsum(np.exp(log_gaps))]


def ordinal_objective(params: np.ndarray, X: np.ndarray, level: np.ndarray, n_levels: int) -> tuple[float, np.ndarray]:
    """Proportional-odds mean negative log-likelihood and gradient.

    ``level`` indexes ordered outcomes with 0 the best. The model is
    ``P(level <= k) = sigmoid(theta_k + X @ w)``, so positive weights move
    mass toward better outcomes. ``params = [w..., theta_0, log_gaps...]``
    with ``theta_k = theta_0 + sum(exp(log_gaps[:k]))``.
    """
    p = X.shape[1]
    K = n_levels
    w, theta0, log_gaps = params[:p], params[p], params[p + 1 :]
    theta = cutpoints_from_params(theta0, log_gaps)  # K-1 cutpoints
    linpred = X @ w
    n = len(level)

    has_upper = level < K - 1
    has_lower = level > 0
    a = np.where(has_upper, theta[np.minimum(level, K - 2)] + linpred, np.inf)
    b = np.where(has_lower, theta[np.maximum(level - 1, 0)] + linpred, -np.inf)

    ll = np.zeros(n)
    da = np.zeros(n)
    db = np.zeros(n)
    both = has_upper & has_lower
    up_only = has_upper & ~has_lower
    low_only = has_lower & ~has_upper

    ab, bb = a[both], b[both]
    gap = ab - bb
    ll[both] = log_expit(ab) + log_expit(-bb) + np.log(-np.expm1(-gap))
    inv = 1.0 / np.expm1(gap)
    da[both] = (1.0 - expit(ab)) + inv
    db[both] = -expit(bb) - inv

    ll[up_only] = log_expit(a[up_only])
    da[up_only] = 1.0 - expit(a[up_only])
    ll[low_only] = log_expit(-b[low_only])
    db[low_only] = -expit(b[low_only])

    d_eta = da + db
    g_theta = np.zeros(K - 1)
    np.add.at(g_theta, level[has_upper], da[has_upper])
    np.add.at(g_theta, level[has_lower] - 1, db[has_lower])

    grad = np.empty_like(params)
    grad[:p] = -(X.T @ d_eta) / n
    grad[p] = -g_theta.sum() / n
    # d theta_k / d log_gaps[m] = exp(log_gaps[m]) for k > m
    tail = np.cumsum(g_theta[::-1])[::-1]  # tail[m] = sum_{k >= m} g_theta[k]
    grad[p + 1 :] = -np.exp(log_gaps) * tail[1:] / n
    return float(-ll.mean()), grad


def _ordinal_start(level: np.ndarray, n_levels: int, p: int) -> np.ndarray:
    counts = np.bincount(level, minlength=n_levels).astype(float)
    cum = np.cumsum(counts)[:-1] / counts.sum()
    cum = np.clip(cum, 1e-6, 1 - 1e-6)
    theta = np.log(cum / (1 - cum))
    gaps = np.maximum(np.diff(theta), 1e-3)
    return np.r_[np.zeros(p), theta[0], np.log(gaps)]


def _fit_ordinal(X: np.ndarray, level: np.ndarray, n_levels: int, lam: float, x0: np.ndarray | None = None, **solver) -> SolverResult:
    p = X.shape[1]
    if x0 is None:
        x0 = _ordinal_start(level, n_levels, p)
    penalized = np.r_[np.ones(p, dtype=bool), np.zeros(n_levels - 1, dtype=bool)]
    return proximal_gradient(lambda v: ordinal_objective(v, X, level, n_levels), x0, penalized, lam, **solver)


# --- public fits ----------------------------------------------------------


def fit_binary_at(matrix: DesignMatrix, lam: float, **solver) -> RegressionModel:
    """Binary fit at a fixed penalty."""
    y = matrix.y.astype(float)
    if len(np.unique(y)) < 2:
        raise FitError("binary logistic regression needs both classes present")
    res = _fit_binary(matrix.X, y, lam, **solver)
    p = matrix.X.shape[1]
    return RegressionModel(
        kind="binary",
        columns=matrix.columns,
        weights=res.x[:p].copy(),
        intercept=float(res.x[p]),
        lam=lam,
        loglik=-binary_objective(res.x, matrix.X, y)[0] * len(y),
        iterations=res.iterations,
        history=res.history,
    )


def ordinal_levels(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sorted distinct outcomes (best first) and each row's level index."""
    levels = np.unique(y)
    return levels, np.searchsorted(levels, y)


def fit_ordinal_at(matrix: DesignMatrix, lam: float, **solver) -> RegressionModel:
    """Proportional-odds fit at a fixed penalty; ``y`` holds ranks, 1 = best."""
    levels, level = ordinal_levels(matrix.y)
    K = len(levels)
    if K < 3:
        raise ValidationError("ordinal regression needs at least 3 outcome levels")
    res = _fit_ordinal(matrix.X, level, K, lam, **solver)
    p = matrix.X.shape[1]
    return RegressionModel(
        kind="ordinal",
        columns=matrix.columns,
        weights=res.x[:p].copy(),
        cutpoints=cutpoints_from_params(res.x[p], res.x[p + 1 :]),
        levels=levels,
        lam=lam,
        loglik=-ordinal_objective(res.x, matrix.X, level, K)[0] * len(level),
        iterations=res.iterations,
        history=res.history,
    )


def _select_lambda(matrix: DesignMatrix, family: str, lambdas: Sequence[float], k: int, seed: int, **solver) -> tuple[float, dict[float, float]]:
    from .cv import cross_validate

    scores = {float(lam): cross_validate(matrix, family, k=k, lam=lam, seed=seed, **solver) for lam in sorted(lambdas, reverse=True)}
    best = max(scores.values())
    # ties go to the sparser model
    chosen = max(lam for lam, s in scores.items() if s == best)
    return chosen, scores


def fit_binary_logit(
    matrix: DesignMatrix,
    lambdas: Sequence[float] = DEFAULT_LAMBDAS,
    k: int = 5,
    seed: int = 0,
    **solver,
) -> RegressionModel:
    """Binary fit with the L1 penalty chosen by grouped k-fold CV accuracy."""
    if len(np.unique(matrix.y)) < 2:
        raise FitError("binary logistic regression needs both classes present")
    lam, scores = _select_lambda(matrix, "binary", lambdas, k, seed, **solver)
    model = fit_binary_at(matrix, lam, **solver)
    model.cv_score, model.cv_scores = scores[lam], scores
    return model


def fit_ordinal_logit(
    matrix: DesignMatrix,
    lambdas: Sequence[float] = DEFAULT_LAMBDAS,
    k: int = 5,
    seed: int = 0,
    **solver,
) -> RegressionModel:
    """Proportional-odds fit with the L1 penalty chosen by grouped k-fold CV NDCG.

    Falls back to a binary win/loss fit (best level vs the rest) when fewer
    than three outcome levels are present.
    """
    levels = np.unique(matrix.y)
    if len(levels) < 3:
        warnings.warn("fewer than 3 outcome levels; falling back to binary logistic regression", RuntimeWarning)
        binary = DesignMatrix(matrix.X, matrix.columns, (matrix.y == levels[0]).astype(int), "binary", matrix.groups, matrix.slots)
        return fit_binary_logit(binary, lambdas, k, seed, **solver)
    lam, scores = _select_lambda(matrix, "ordinal", lambdas, k, seed, **solver)
    model = fit_ordinal_at(matrix, lam, **solver)
    model.cv_score, model.cv_scores = scores[lam], scores
    return model


def normalize_weights(model: RegressionModel) -> WeightModel:
    """Divide the selected (nonzero) weights by their absolute sum, keeping signs.

    Intercepts and cutpoints are not carried over.
    """
    selected = model.weight_map(nonzero_only=True)
    total = sum(abs(w) for w in selected.values())
    if not selected or total == 0:
        raise FitError("all fitted weights are zero; nothing to normalize")
    return WeightModel(
        {c: w / total for c, w in selected.items()},
        provenance="fitted",
        metadata={"kind": model.kind, "lambda": model.lam, "cv_score": model.cv_score},
    )
