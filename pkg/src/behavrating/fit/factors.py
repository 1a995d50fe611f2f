"""Principal-component factor extraction with direct oblimin rotation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..behavioral import FactorModel
from ..errors import ConvergenceError, FitError, ValidationError
from .design import DesignMatrix


@dataclass
class FactorFit:
    columns: tuple[str, ...]
    eigenvalues: np.ndarray
    unrotated: np.ndarray
    pattern: np.ndarray
    factor_corr: np.ndarray
    rotation_iterations: int
    model: FactorModel


def correlation_matrix(X: np.ndarray, columns: tuple[str, ...] = ()) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    sd = X.std(axis=0)
    flat = np.flatnonzero(sd == 0)
    if flat.size:
        names = [columns[i] for i in flat] if columns else flat.tolist()
        raise FitError(f"correlation matrix undefined: constant column(s) {names}")
    Z = (X - X.mean(axis=0)) / sd
    return (Z.T @ Z) / X.shape[0]


def _oblimin_criterion(L: np.ndarray, gamma: float) -> tuple[float, np.ndarray]:
    p, k = L.shape
    L2 = L * L
    X = L2 @ (np.ones((k, k)) - np.eye(k))
    if gamma != 0:
        X = (np.eye(p) - gamma / p * np.ones((p, p))) @ X
    return float(np.sum(L2 * X) / 4.0), L * X


def oblimin(
    A: np.ndarray,
    gamma: float = 0.0,
    max_iter: int = 1000,
    tol: float = 1e-6,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Oblique gradient-projection rotation of loadings ``A`` under oblimin.

    Returns the pattern matrix, the factor correlation matrix and the number
    of iterations used.
    """
    k = A.shape[1]
    T = np.eye(k)
    alpha = 1.0
    L = A @ np.linalg.inv(T).T
    f, Gq = _oblimin_criterion(L, gamma)
    G = -(L.T @ Gq @ np.linalg.inv(T)).T
    for it in range(max_iter):
        Gp = G - T @ np.diag(np.sum(T * G, axis=0))
        s = np.linalg.norm(Gp)
        if s < tol:
            return L, T.T @ T, it
        alpha *= 2
        for _ in range(11):
            X = T - alpha * Gp
            Tt = X / np.sqrt(np.sum(X * X, axis=0))
            Lt = A @ np.linalg.inv(Tt).T
            ft, Gqt = _oblimin_criterion(Lt, gamma)
            if ft < f - 0.5 * s * s * alpha:
                break
            alpha /= 2
        T, L, f, Gq = Tt, Lt, ft, Gqt
        G = -(L.T @ Gq @ np.linalg.inv(T)).T
    raise ConvergenceError(f"oblimin rotation did not converge in {max_iter} iterations")


def extract_factors(
    matrix: DesignMatrix,
    n_factors: int | None = None,
    gamma: float = 0.0,
    threshold: float = 0.4,
    names: list[str] | None = None,
    max_iter: int = 1000,
) -> FactorFit:
    """Fit factors on the feature columns of ``matrix``.

    Factors are retained by the Kaiser rule (eigenvalue > 1) unless
    ``n_factors`` is given. Each feature joins the factor with its largest
    absolute pattern loading when that loading reaches ``threshold``;
    within a factor, loadings are divided by their absolute sum.
    """
    X, columns = matrix.X, matrix.columns
    n, p = X.shape
    if p < 2:
        raise ValidationError("factor extraction needs at least 2 columns")
    if n <= p:
        raise ValidationError(f"factor extraction needs more rows than columns ({n} <= {p})")

    R = correlation_matrix(X, columns)
    evals, evecs = np.linalg.eigh(R)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    k = n_factors if n_factors is not None else max(1, int(np.sum(evals > 1.0)))
    if not 1 <= k <= p:
        raise ValidationError(f"factor count {k} outside 1..{p}")
    A = evecs[:, :k] * np.sqrt(np.clip(evals[:k], 0.0, None))

    if k > 1:
        pattern, factor_corr, iters = oblimin(A, gamma=gamma, max_iter=max_iter)
    else:
        pattern, factor_corr, iters = A.copy(), np.eye(1), 0

    owner = np.argmax(np.abs(pattern), axis=1)
    strength = np.abs(pattern[np.arange(p), owner])
    factors = []
    for j in range(k):
        members = [i for i in range(p) if owner[i] == j and strength[i] >= threshold]
        if not members:
            continue
        ld = pattern[members, j]
        if ld.sum() < 0:
            ld = -ld
        ld = ld / np.abs(ld).sum()
        explained = float(np.sum(pattern[:, j] ** 2))
        factors.append((explained, {columns[i]: float(v) for i, v in zip(members, ld)}))
    if not factors:
        raise FitError(f"no feature reaches the membership threshold {threshold}")
    factors.sort(key=lambda item: -item[0])
    if names is not None and len(names) < len(factors):
        raise ValidationError(f"{len(factors)} factors but only {len(names)} names")
    labels = names if names is not None else [f"factor_{i + 1}" for i in range(len(factors))]
    model = FactorModel(
        tuple((labels[i], ld) for i, (_, ld) in enumerate(factors)),
        provenance="fitted",
        metadata={
            "extraction": "pca",
            "rotation": "oblimin" if k > 1 else "none",
            "gamma": gamma,
            "threshold": threshold,
            "n_factors": k,
            "eigenvalues": [float(v) for v in evals],
        },
    )
    return FactorFit(columns, evals, A, pattern, factor_corr, iters, model)


def fit_factors(matrix: DesignMatrix, n_factors: int | None = None, **kwargs) -> FactorModel:
    return extract_factors(matrix, n_factors=n_factors, **kwargs).model
