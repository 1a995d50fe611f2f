from __future__ import annotations

import numpy as np

from ..errors import ValidationError
from ..metrics import ndcg_from_orders, predict_ranks
from .design import DesignMatrix


def group_kfold(groups: np.ndarray, k: int = 5, seed: int = 0) -> list[np.ndarray]:
    """Row indices of each test fold.

    Distinct groups (matches) are shuffled once with ``seed`` and cut into
    ``k`` contiguous blocks, so both sides of a match land in the same fold.
    """
    unique = np.unique(groups)
    if len(unique) < k:
        raise ValidationError(f"{len(unique)} matches cannot be split into {k} folds")
    rng = np.random.default_rng(seed)
    shuffled = unique[rng.permutation(len(unique))]
    fold_of = {g: i for i, block in enumerate(np.array_split(shuffled, k)) for g in block}
    assignment = np.array([fold_of[g] for g in groups])
    return [np.flatnonzero(assignment == i) for i in range(k)]


def binary_accuracy(model, matrix: DesignMatrix) -> float:
    linpred = matrix.X @ model.weights + model.intercept
    return float(np.mean((linpred >= 0).astype(int) == matrix.y))


def ordinal_ndcg(model, matrix: DesignMatrix, seed: int = 0) -> float:
    """Mean NDCG over matches, teams scored by their best member's linear predictor."""
    linpred = matrix.X @ model.weights
    rng = np.random.default_rng(seed)
    scores = []
    order = np.argsort(matrix.groups, kind="stable")
    groups = matrix.groups[order]
    bounds = np.flatnonzero(np.r_[True, groups[1:] != groups[:-1], True])
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        rows = order[lo:hi]
        team_value: dict[str, float] = {}
        team_rank: dict[str, int] = {}
        for r in rows:
            slot = str(matrix.slots[r])
            team_value[slot] = max(team_value.get(slot, -np.inf), float(linpred[r]))
            team_rank[slot] = int(matrix.y[r])
        if len(team_value) < 2:
            continue
        pred = predict_ranks(team_value, rng)
        scores.append(ndcg_from_orders(sorted(pred, key=pred.get), _rerank(team_rank)))
    if not scores:
        raise ValidationError("no multi-team matches in evaluation fold")
    return float(np.mean(scores))


def _rerank(ranks: dict[str, int]) -> dict[str, int]:
    # a fold may hold only some of a match's teams' rows; keep the order, renumber 1..T
    return {s: 1 + sum(1 for o in ranks.values() if o < r) for s, r in ranks.items()}


def cross_validate(matrix: DesignMatrix, family: str, k: int = 5, lam: float = 0.0, seed: int = 0, **solver) -> float:
    """Mean held-out score over ``k`` match-grouped folds.

    ``family`` is ``"binary"`` (accuracy) or ``"ordinal"`` (NDCG of the
    predicted team order).
    """
    from .logit import fit_binary_at, fit_ordinal_at

    if matrix.n_rows < k:
        raise ValidationError(f"{matrix.n_rows} rows cannot be split into {k} folds")
    folds = group_kfold(matrix.groups, k, seed)
    all_rows = np.arange(matrix.n_rows)
    scores = []
    for i, test in enumerate(folds):
        train = np.setdiff1d(all_rows, test)
        train_m, test_m = matrix.rows(train), matrix.rows(test)
        if family == "binary":
            model = fit_binary_at(train_m, lam, **solver)
            scores.append(binary_accuracy(model, test_m))
        elif family == "ordinal":
            model = fit_ordinal_at(train_m, lam, **solver)
            scores.append(ordinal_ndcg(model, test_m, seed=seed + i))
        else:
            raise ValueError(f"unknown model family {family!r}")
    return float(np.mean(scores))
