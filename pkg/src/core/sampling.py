"""
Synthetic Dirichlet-multinomial data.

Rows are generated in fixed-size chunks. Chunk i draws from a Philox
generator keyed by SeedSequence([seed, i]), so a dataset depends only on
(spec, seed) and never on how many workers produced it.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Union

import numpy as np

from .config import RowTotalSpec, SynthSpec
from .exceptions import ValidationError
from .models import CountMatrix, DirichletParams, as_params
from .utils.logging import get_logger
from .utils.validation import SIMPLEX_TOLERANCE

logger = get_logger(__name__)

CHUNK_ROWS = 1024

AlphaLike = Union[DirichletParams, np.ndarray, list]


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for (seed, stream)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


def _log_gamma_variates(alpha: np.ndarray, rng: np.random.Generator, size: int) -> np.ndarray:
    """log of Gamma(alpha_k, 1) draws, shape (size, K).

    Shapes below one are boosted: G(a) = G(a + 1) * U^(1/a), kept in log space
    so that tiny shapes do not underflow to zero.
    """
    small = alpha < 1.0
    shape = np.where(small, alpha + 1.0, alpha)
    logs = np.log(rng.standard_gamma(shape, size=(size, alpha.shape[0])))
    if np.any(small):
        u = rng.random(size=(size, int(small.sum())))
        logs[:, small] += np.log1p(-u) / alpha[small]
    return logs


def sample_dirichlet_rows(alpha: AlphaLike, n: int, rng: np.random.Generator) -> np.ndarray:
    """n independent Dirichlet(alpha) points, shape (n, K)."""
    a = as_params(alpha).alpha
    logs = _log_gamma_variates(a, rng, n)
    logs -= logs.max(axis=1, keepdims=True)
    p = np.exp(logs)
    return p / p.sum(axis=1, keepdims=True)


def sample_dirichlet(alpha: AlphaLike, rng: np.random.Generator) -> np.ndarray:
    """One point on the K-simplex distributed Dirichlet(alpha)."""
    return sample_dirichlet_rows(alpha, 1, rng)[0]


def sample_counts(p: Any, n: int, rng: np.random.Generator) -> np.ndarray:
    """Multinomial(n, p) draw; the result always sums to n."""
    probs = np.asarray(p, dtype=np.float64)
    if probs.ndim != 1 or probs.shape[0] < 1 or np.any(probs < 0) or abs(probs.sum() - 1.0) > SIMPLEX_TOLERANCE:
        raise ValidationError("p must be a probability vector")
    if n < 0:
        raise ValidationError("n must be non-negative", {"n": n})
    return rng.multinomial(n, probs).astype(np.int64)


def sample_row_totals(spec: RowTotalSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    if spec.kind == "fixed":
        return np.full(n, spec.value, dtype=np.int64)
    if spec.kind == "uniform":
        return rng.integers(spec.low, spec.high, size=n, endpoint=True, dtype=np.int64)
    return rng.poisson(spec.mean, size=n).astype(np.int64)


def _synthesize_chunk(spec: SynthSpec, alpha: np.ndarray, index: int) -> np.ndarray:
    start = index * CHUNK_ROWS
    rows = min(CHUNK_ROWS, spec.n_rows - start)
    rng = make_rng(spec.seed, index)
    totals = sample_row_totals(spec.row_total, rows, rng)
    p = sample_dirichlet_rows(alpha, rows, rng)
    return rng.multinomial(totals, p).astype(np.int64)


def synthesize(spec: SynthSpec, workers: int = 1) -> CountMatrix:
    """N independent Dirichlet-multinomial rows, deterministic given spec.seed."""
    alpha = DirichletParams(np.asarray(spec.alpha, dtype=np.float64)).alpha
    n_chunks = -(-spec.n_rows // CHUNK_ROWS)
    if workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda i: _synthesize_chunk(spec, alpha, i), range(n_chunks)))
    else:
        chunks = [_synthesize_chunk(spec, alpha, i) for i in range(n_chunks)]
    logger.debug(
        "Synthesized %d rows (K=%d, row totals %s, seed %d)",
        spec.n_rows,
        alpha.shape[0],
        spec.row_total.describe(),
        spec.seed,
    )
    return CountMatrix(np.concatenate(chunks, axis=0))
