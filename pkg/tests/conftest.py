"""Shared fixtures for the FastDM test suite."""

import numpy as np
import pytest

from src.core.config import SynthSpec
from src.core.models import CountMatrix
from src.core.sampling import synthesize

from .helpers import TABLE_EXAMPLE


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture
def table_counts() -> CountMatrix:
    """Two rows whose tallies are worked out by hand in test_compressed."""
    return CountMatrix(np.array(TABLE_EXAMPLE))


@pytest.fixture
def dm_data() -> CountMatrix:
    """Moderately sized Dirichlet-multinomial sample from alpha = [3, 1, 2]."""
    return synthesize(SynthSpec(alpha=[3.0, 1.0, 2.0], n_rows=400, row_total=10, seed=7))


@pytest.fixture(autouse=True)
def clean_fastdm_env(monkeypatch: pytest.MonkeyPatch) -> None:
    """Keep FASTDM_* settings from the developer's shell out of the tests."""
    for name in ("TOL", "MAX_ITERS", "METHOD", "INIT", "INIT_ALPHA", "ALPHA_CAP", "ALPHA_FLOOR",
                 "MIN_STEP", "SHARDS", "WORKERS", "LOG_LEVEL"):
        monkeypatch.delenv(f"FASTDM_{name}", raising=False)
