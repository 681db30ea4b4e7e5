"""Random dataset builders shared by the test modules."""

import numpy as np

TABLE_EXAMPLE = [[3, 1], [0, 2]]


def random_counts(rng: np.random.Generator, n_rows: int, n_categories: int, max_total: int) -> np.ndarray:
    """Random count matrix with row totals up to max_total and no empty column."""
    totals = rng.integers(0, max_total + 1, size=n_rows)
    p = rng.dirichlet(np.ones(n_categories), size=n_rows)
    counts = rng.multinomial(totals, p)
    counts[0, :] += 1
    return counts


def random_dm_counts(rng: np.random.Generator, n_rows: int, alpha, row_total: int) -> np.ndarray:
    """Counts drawn from DirMult(alpha) with a fixed row total and no empty column."""
    p = rng.dirichlet(alpha, size=n_rows)
    counts = rng.multinomial(np.full(n_rows, row_total), p)
    counts[0, :] += 1
    return counts
