"""
Validation utilities for FastDM.

Each validator converts its input to a numpy array and raises a
ValidationError subclass describing the first violated invariant.
"""

from typing import Any, Optional

import numpy as np

from ..exceptions import DimensionMismatchError, DomainError, ValidationError

SIMPLEX_TOLERANCE = 1e-9


def validate_counts(counts: Any, n_categories: Optional[int] = None) -> np.ndarray:
    """Validate an N x K count matrix.

    Args:
        counts: Nested sequence or array of non-negative integers
        n_categories: Expected K, inferred when omitted

    Returns:
        A C-contiguous int64 array of shape (N, K)
    """
    try:
        arr = np.asarray(counts)
    except ValueError as e:
        raise ValidationError(f"Count rows are not rectangular: {e}") from e
    if arr.dtype == object:
        raise ValidationError("Count rows are not rectangular")
    if arr.ndim == 1 and arr.size == 0:
        if n_categories is None:
            raise ValidationError("Cannot infer category count from an empty dataset")
        arr = arr.reshape(0, n_categories)
    if arr.ndim != 2:
        raise ValidationError(f"Count data must be two-dimensional, got shape {arr.shape}")
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise ValidationError("Counts must be integers")
    elif arr.dtype.kind not in "iub":
        raise ValidationError(f"Counts must be integers, got dtype {arr.dtype}")
    if arr.shape[1] < 1:
        raise ValidationError("Count data needs at least one category")
    if n_categories is not None and arr.shape[1] != n_categories:
        raise DimensionMismatchError(
            "Row length does not match category count",
            expected=n_categories,
            actual=arr.shape[1],
        )
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    if arr.size and arr.min() < 0:
        row = int(np.argwhere(arr < 0)[0][0])
        raise ValidationError("Counts must be non-negative", {"row": row})
    return arr


def validate_count_row(row: Any, n_categories: int) -> np.ndarray:
    """Validate a single K-vector of counts."""
    arr = np.asarray(row)
    if arr.ndim != 1:
        raise ValidationError(f"A count row must be one-dimensional, got shape {arr.shape}")
    return validate_counts(arr.reshape(1, -1), n_categories)[0]


def validate_probabilities(rows: Any) -> np.ndarray:
    """Validate an N x K matrix of strictly positive simplex points."""
    arr = np.asarray(rows, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise ValidationError(f"Probability data must be N x K with K >= 2, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("Probabilities must be finite")
    if arr.size and arr.min() <= 0:
        row = int(np.argwhere(arr <= 0)[0][0])
        raise DomainError("Probabilities must be strictly positive", {"row": row})
    sums = arr.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > SIMPLEX_TOLERANCE)
    if bad.size:
        raise ValidationError(
            "Probability rows must sum to 1",
            {"row": int(bad[0]), "sum": float(sums[bad[0]])},
        )
    return arr


def validate_alpha(alpha: Any, min_categories: int = 2) -> np.ndarray:
    """Validate a strictly positive, finite parameter vector."""
    arr = np.asarray(alpha, dtype=np.float64)
    if arr.ndim != 1 or arr.size < min_categories:
        raise ValidationError(
            f"alpha must be a vector with at least {min_categories} entries, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("alpha must be strictly positive and finite", {"alpha": arr.tolist()})
    return arr
