"""
Data models for Dirichlet and Dirichlet-multinomial estimation.

Numeric containers are frozen dataclasses around numpy arrays; the arrays are
validated and marked read-only on construction.
"""

from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

import numpy as np

from .utils.validation import validate_alpha, validate_counts, validate_probabilities


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CountMatrix:
    """N rows of K non-negative integer counts."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", _freeze(validate_counts(self.counts).copy()))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], n_categories: Optional[int] = None) -> "CountMatrix":
        """Build from any nested iterable; n_categories is needed for an empty dataset."""
        materialized = [list(r) for r in rows]
        if not materialized:
            if n_categories is None:
                raise ValueError("n_categories is required for an empty dataset")
            return cls(np.zeros((0, n_categories), dtype=np.int64))
        return cls(validate_counts(materialized, n_categories))

    @property
    def n_rows(self) -> int:
        return int(self.counts.shape[0])

    @property
    def n_categories(self) -> int:
        return int(self.counts.shape[1])

    @property
    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def nonzero_rows(self) -> "CountMatrix":
        """Rows with a positive total; all-zero rows carry no information about alpha."""
        keep = self.row_totals > 0
        if keep.all():
            return self
        return CountMatrix(self.counts[keep])

    def __len__(self) -> int:
        return self.n_rows


@dataclass(frozen=True, eq=False)
class ProbabilityMatrix:
    """N rows of strictly positive points on the K-simplex."""

    rows: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", _freeze(validate_probabilities(self.rows).copy()))

    @property
    def n_rows(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_categories(self) -> int:
        return int(self.rows.shape[1])

    def __len__(self) -> int:
        return self.n_rows


@dataclass(frozen=True, eq=False)
class DirichletParams:
    """Strictly positive concentration vector alpha (K >= 2)."""

    alpha: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _freeze(validate_alpha(self.alpha).copy()))

    @property
    def n_categories(self) -> int:
        return int(self.alpha.shape[0])

    @property
    def total(self) -> float:
        return float(self.alpha.sum())

    def tolist(self) -> list:
        return self.alpha.tolist()


@dataclass(frozen=True, eq=False)
class DirichletSuffStat:
    """Mean log-probabilities of a pure Dirichlet dataset."""

    v_log: np.ndarray
    n_rows: int
    # mean and first-component variance of the rows, used by moment initialization
    mean: Optional[np.ndarray] = field(default=None, compare=False)
    first_variance: Optional[float] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        v_log = np.asarray(self.v_log, dtype=np.float64).copy()
        object.__setattr__(self, "v_log", _freeze(v_log))

    @property
    def n_categories(self) -> int:
        return int(self.v_log.shape[0])


def as_params(alpha: Any) -> DirichletParams:
    """Accept either DirichletParams or a raw vector."""
    if isinstance(alpha, DirichletParams):
        return alpha
    return DirichletParams(np.asarray(alpha, dtype=np.float64))
