from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..behavioral import FactorModel
from ..errors import ValidationError


@dataclass(frozen=True)
class DesignMatrix:
    """Player-match observations for the weight and factor fits.

    ``y`` holds 0/1 outcomes when ``kind`` is ``"binary"`` and observed team
    ranks (1 = best) when it is ``"ordinal"``. ``groups`` and ``slots`` name
    the match and team of each row so folds and NDCG can respect matches.
    """

    X: np.ndarray
    columns: tuple[str, ...]
    y: np.ndarray
    kind: str = "binary"
    groups: np.ndarray | None = None
    slots: np.ndarray | None = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim != 2:
            raise ValidationError("design matrix must be 2-dimensional")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "columns", tuple(self.columns))
        y = np.asarray(self.y)
        object.__setattr__(self, "y", y)
        n = X.shape[0]
        if len(self.columns) != X.shape[1]:
            raise ValidationError(f"{X.shape[1]} columns but {len(self.columns)} column ids")
        if len(set(self.columns)) != len(self.columns):
            raise ValidationError("column ids must be unique")
        if y.shape != (n,):
            raise ValidationError("target length does not match row count")
        if not np.all(np.isfinite(X)):
            raise ValidationError("design matrix has missing or non-finite cells")
        if self.kind not in ("binary", "ordinal"):
            raise ValidationError(f"unknown target kind {self.kind!r}")
        if self.kind == "binary" and n and not np.isin(y, (0, 1)).all():
            raise ValidationError("binary target must be 0/1")
        groups = np.arange(n).astype(str) if self.groups is None else np.asarray(self.groups)
        slots = np.zeros(n, dtype=str) if self.slots is None else np.asarray(self.slots)
        if groups.shape != (n,) or slots.shape != (n,):
            raise ValidationError("groups/slots length does not match row count")
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "slots", slots)

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    def rows(self, index: np.ndarray) -> DesignMatrix:
        return DesignMatrix(self.X[index], self.columns, self.y[index], self.kind, self.groups[index], self.slots[index])

    def select(self, columns: Sequence[str]) -> DesignMatrix:
        idx = [self.columns.index(c) for c in columns]
        return DesignMatrix(self.X[:, idx], tuple(columns), self.y, self.kind, self.groups, self.slots)

    def with_terms(self, factors: FactorModel | None) -> DesignMatrix:
        """Replace factor-absorbed features by factor scores.

        The result holds every factor followed by every feature that no
        factor absorbed.
        """
        if factors is None:
            return self
        cols, blocks = [], []
        for name, loadings in factors.factors:
            missing = [f for f in loadings if f not in self.columns]
            if missing:
                raise ValidationError(f"factor {name!r} needs missing column(s) {missing}")
            w = np.array([loadings[f] for f in loadings])
            blocks.append(self.X[:, [self.columns.index(f) for f in loadings]] @ w)
            cols.append(name)
        absorbed = factors.absorbed()
        for j, c in enumerate(self.columns):
            if c not in absorbed:
                blocks.append(self.X[:, j])
                cols.append(c)
        X = np.column_stack(blocks) if blocks else np.empty((self.n_rows, 0))
        return DesignMatrix(X, tuple(cols), self.y, self.kind, self.groups, self.slots)
