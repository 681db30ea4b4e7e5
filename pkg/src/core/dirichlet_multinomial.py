"""
Dirichlet-multinomial (Polya) likelihood and its four fitting methods.

With D the N x K count matrix, the alpha-dependent part of the log-likelihood is

    F(alpha) = sum_n sum_k lg(alpha_k, d_nk) - sum_n lg(A, d_n)

where lg(a, n) = ln(a (a+1) ... (a+n-1)), A = sum(alpha) and d_n is the row
total. Grouping the rising-factorial terms by their offset m rewrites it over
the compressed tallies:

    F(alpha) = sum_k sum_m u_km ln(alpha_k + m) - sum_m v_m ln(A + m)

Methods:
    newton-compressed  damped Newton on (U, v), O(MK) per iteration
    fp-compressed      multiplicative fixed point on (U, v)
    fp-naive           fixed point with digamma row sums, O(NK) per iteration
    newton-naive       Newton with digamma/trigamma row sums
"""

import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, List, Optional, Tuple, Union

import numpy as np

from .compressed import CompressedStats, build_compressed_sharded
from .config import SolverConfig
from .dirichlet import initial_alpha
from .exceptions import (
    BoundaryEstimateError,
    ConfigurationError,
    DegenerateDenominatorError,
    EmptyDataError,
    ValidationError,
)
from .models import CountMatrix, DirichletParams, as_params
from .newton import StructuredHessian, check_alpha_bounds, run_newton
from .schemas import PhaseTimings, SolverReport
from .special import digamma, dual_log_gamma, trigamma
from .utils.logging import get_logger
from .utils.validation import validate_count_row

logger = get_logger(__name__)

DataLike = Union[CompressedStats, CountMatrix, np.ndarray, List[List[int]]]
AlphaLike = Union[DirichletParams, np.ndarray, list]


def _as_counts(data: Any) -> CountMatrix:
    return data if isinstance(data, CountMatrix) else CountMatrix(np.asarray(data))


def _check_k(n_categories: int, alpha: np.ndarray) -> None:
    if alpha.shape[0] != n_categories:
        raise ValidationError(
            "alpha length does not match the data",
            {"expected": n_categories, "actual": alpha.shape[0]},
        )


def _pairwise_sum(parts: List[np.ndarray]) -> np.ndarray:
    """Reduce partial sums with a fixed pairwise tree."""
    level = parts
    while len(level) > 1:
        paired = [level[i] + level[i + 1] for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            paired.append(level[-1])
        level = paired
    return level[0]


def _sharded_row_sum(
    counts: np.ndarray,
    block: Callable[[np.ndarray], np.ndarray],
    shards: int = 1,
    workers: int = 1,
) -> np.ndarray:
    """Sum block(chunk) over row shards.

    The reduction order depends only on the shard count, so the result is
    bit-stable across runs and worker counts.
    """
    if shards <= 1 or counts.shape[0] <= 1:
        return block(counts)
    pieces = np.array_split(counts, min(shards, counts.shape[0]))
    if workers == 1:
        parts = [block(p) for p in pieces]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(block, pieces))
    return _pairwise_sum(parts)


# ---------------------------------------------------------------------------
# Probabilities


def dm_log_prob(alpha: AlphaLike, counts: Any) -> float:
    """Log probability of one count vector under DirMult(alpha).

    Includes the multinomial coefficient, so exp() sums to one over all
    count vectors with the same total. An all-zero vector has probability 1.
    """
    a = as_params(alpha).alpha
    c = validate_count_row(counts, a.shape[0])
    n = int(c.sum())
    if n == 0:
        return 0.0
    value = (
        np.sum(dual_log_gamma(a, c))
        - dual_log_gamma(a.sum(), n)
        + dual_log_gamma(1.0, n)
        - np.sum(dual_log_gamma(1.0, c))
    )
    return float(value)


def dm_log_likelihood(alpha: AlphaLike, data: Any) -> float:
    """Full log-likelihood sum_n dm_log_prob(alpha, d_n)."""
    a = as_params(alpha).alpha
    counts = _as_counts(data).counts
    _check_k(counts.shape[1], a)
    if counts.shape[0] == 0:
        return 0.0
    totals = counts.sum(axis=1)
    value = (
        np.sum(dual_log_gamma(a[np.newaxis, :], counts))
        - np.sum(dual_log_gamma(a.sum(), totals))
        + np.sum(dual_log_gamma(1.0, totals))
        - np.sum(dual_log_gamma(1.0, counts))
    )
    return float(value)


# ---------------------------------------------------------------------------
# Compressed objective and derivatives


def _offsets(stats: CompressedStats) -> np.ndarray:
    return np.arange(stats.max_total, dtype=np.float64)


def _compressed_objective(stats: CompressedStats, alpha: np.ndarray) -> float:
    if stats.max_total == 0:
        return 0.0
    m = _offsets(stats)
    column_part = np.sum(stats.U * np.log(alpha[:, np.newaxis] + m))
    return float(column_part - stats.v @ np.log(alpha.sum() + m))


def _compressed_gradient(stats: CompressedStats, alpha: np.ndarray) -> np.ndarray:
    if stats.max_total == 0:
        return np.zeros_like(alpha)
    m = _offsets(stats)
    numer = np.sum(stats.U / (alpha[:, np.newaxis] + m), axis=1)
    return numer - stats.v @ (1.0 / (alpha.sum() + m))


def _compressed_hessian(stats: CompressedStats, alpha: np.ndarray) -> StructuredHessian:
    if stats.max_total == 0:
        return StructuredHessian(d=np.zeros_like(alpha), c=0.0)
    m = _offsets(stats)
    d = -np.sum(stats.U / (alpha[:, np.newaxis] + m) ** 2, axis=1)
    c = float(stats.v @ (1.0 / (alpha.sum() + m) ** 2))
    return StructuredHessian(d=d, c=c)


def dm_objective_compressed(stats: CompressedStats, alpha: AlphaLike) -> float:
    """F(alpha) from the tallies; zero when M == 0."""
    a = as_params(alpha).alpha
    _check_k(stats.n_categories, a)
    return _compressed_objective(stats, a)


def dm_gradient_compressed(stats: CompressedStats, alpha: AlphaLike) -> np.ndarray:
    """g_k = sum_m u_km / (alpha_k + m) - sum_m v_m / (A + m)."""
    a = as_params(alpha).alpha
    _check_k(stats.n_categories, a)
    return _compressed_gradient(stats, a)


def dm_hessian_compressed(stats: CompressedStats, alpha: AlphaLike) -> StructuredHessian:
    """d_k = -sum_m u_km / (alpha_k + m)^2 and c = sum_m v_m / (A + m)^2."""
    a = as_params(alpha).alpha
    _check_k(stats.n_categories, a)
    return _compressed_hessian(stats, a)


# ---------------------------------------------------------------------------
# Naive (row-scanning) objective and derivatives


def _naive_objective(counts: np.ndarray, alpha: np.ndarray, shards: int = 1, workers: int = 1) -> float:
    total = alpha.sum()

    def block(chunk: np.ndarray) -> np.ndarray:
        column_part = np.sum(dual_log_gamma(alpha[np.newaxis, :], chunk))
        return np.array(column_part - np.sum(dual_log_gamma(total, chunk.sum(axis=1))))

    if counts.shape[0] == 0:
        return 0.0
    return float(_sharded_row_sum(counts, block, shards, workers))


def _naive_gradient(counts: np.ndarray, alpha: np.ndarray, shards: int = 1, workers: int = 1) -> np.ndarray:
    num, den = _naive_digamma_sums(counts, alpha, shards, workers)
    return num - den


def _naive_digamma_sums(
    counts: np.ndarray, alpha: np.ndarray, shards: int = 1, workers: int = 1
) -> Tuple[np.ndarray, float]:
    """(sum_n psi(d_nk + alpha_k) - psi(alpha_k), sum_n psi(d_n + A) - psi(A))."""
    total = alpha.sum()
    psi_alpha = digamma(alpha)
    psi_total = digamma(total)
    k = alpha.shape[0]

    def block(chunk: np.ndarray) -> np.ndarray:
        out = np.empty(k + 1)
        out[:k] = np.sum(digamma(chunk + alpha[np.newaxis, :]) - psi_alpha, axis=0)
        out[k] = np.sum(digamma(chunk.sum(axis=1) + total) - psi_total)
        return out

    if counts.shape[0] == 0:
        return np.zeros(k), 0.0
    sums = _sharded_row_sum(counts, block, shards, workers)
    return sums[:k], float(sums[k])


def _naive_hessian(counts: np.ndarray, alpha: np.ndarray, shards: int = 1, workers: int = 1) -> StructuredHessian:
    total = alpha.sum()
    tri_alpha = trigamma(alpha)
    tri_total = trigamma(total)
    k = alpha.shape[0]

    def block(chunk: np.ndarray) -> np.ndarray:
        out = np.empty(k + 1)
        out[:k] = np.sum(trigamma(chunk + alpha[np.newaxis, :]) - tri_alpha, axis=0)
        out[k] = np.sum(trigamma(chunk.sum(axis=1) + total) - tri_total)
        return out

    sums = _sharded_row_sum(counts, block, shards, workers)
    return StructuredHessian(d=sums[:k], c=float(-sums[k]))


def dm_objective_naive(data: Any, alpha: AlphaLike) -> float:
    """F(alpha) by scanning every row; zero for an empty dataset."""
    a = as_params(alpha).alpha
    counts = _as_counts(data).counts
    _check_k(counts.shape[1], a)
    return _naive_objective(counts, a)


def dm_gradient_naive(data: Any, alpha: AlphaLike) -> np.ndarray:
    """Digamma form of the gradient, summed over rows."""
    a = as_params(alpha).alpha
    counts = _as_counts(data).counts
    _check_k(counts.shape[1], a)
    return _naive_gradient(counts, a)


def dm_hessian_naive(data: Any, alpha: AlphaLike) -> StructuredHessian:
    """Trigamma form of the Hessian, summed over rows."""
    a = as_params(alpha).alpha
    counts = _as_counts(data).counts
    _check_k(counts.shape[1], a)
    return _naive_hessian(counts, a)


# ---------------------------------------------------------------------------
# Fixed-point steps


def _fp_update(numer: np.ndarray, denom: float, alpha: np.ndarray) -> np.ndarray:
    if not np.isfinite(denom) or denom <= 0:
        raise DegenerateDenominatorError(
            "Fixed-point denominator is not positive; the data has no positive row totals",
            {"denominator": float(denom)},
        )
    return alpha * numer / denom


def _fp_compressed(stats: CompressedStats, alpha: np.ndarray) -> np.ndarray:
    if stats.max_total == 0:
        return _fp_update(np.zeros_like(alpha), 0.0, alpha)
    m = _offsets(stats)
    numer = np.sum(stats.U / (alpha[:, np.newaxis] + m), axis=1)
    denom = float(stats.v @ (1.0 / (alpha.sum() + m)))
    return _fp_update(numer, denom, alpha)


def _fp_naive(counts: np.ndarray, alpha: np.ndarray, shards: int = 1, workers: int = 1) -> np.ndarray:
    numer, denom = _naive_digamma_sums(counts, alpha, shards, workers)
    return _fp_update(numer, denom, alpha)


def fp_step_compressed(stats: CompressedStats, alpha: AlphaLike) -> DirichletParams:
    """One multiplicative update alpha_k * (sum_m u_km/(alpha_k+m)) / (sum_m v_m/(A+m))."""
    a = as_params(alpha).alpha
    _check_k(stats.n_categories, a)
    return DirichletParams(_fp_compressed(stats, a))


def fp_step_naive(data: Any, alpha: AlphaLike) -> DirichletParams:
    """One multiplicative update from digamma row sums."""
    a = as_params(alpha).alpha
    counts = _as_counts(data).counts
    _check_k(counts.shape[1], a)
    return DirichletParams(_fp_naive(counts, a))


def run_fixed_point(
    alpha0: np.ndarray,
    step: Callable[[np.ndarray], np.ndarray],
    gradient: Callable[[np.ndarray], np.ndarray],
    objective: Callable[[np.ndarray], float],
    config: SolverConfig,
    method: str,
    precompute_seconds: float = 0.0,
) -> SolverReport:
    """Iterate alpha <- step(alpha) until ||g||_inf <= config.tol or max_iters."""
    start = time.perf_counter()
    alpha = np.array(alpha0, dtype=np.float64)
    g = gradient(alpha)
    grad_norm = float(np.max(np.abs(g)))
    iterations = 0
    message = None

    while grad_norm > config.tol:
        if iterations >= config.max_iters:
            message = f"reached max_iters={config.max_iters}"
            break
        alpha = step(alpha)
        iterations += 1
        check_alpha_bounds(alpha, config.alpha_cap, config.alpha_floor, iterations)
        g = gradient(alpha)
        grad_norm = float(np.max(np.abs(g)))
        logger.debug("%s iter %d: |g|=%.3e", method, iterations, grad_norm)

    solve_seconds = time.perf_counter() - start
    converged = grad_norm <= config.tol
    if not converged:
        logger.warning("%s stopped without converging: %s (|g|=%.3e)", method, message, grad_norm)
    return SolverReport(
        alpha_hat=alpha.tolist(),
        iterations=iterations,
        final_grad_norm=grad_norm,
        converged=converged,
        objective=objective(alpha),
        method=method,
        tol=config.tol,
        timings=PhaseTimings(precompute_seconds=precompute_seconds, solve_seconds=solve_seconds),
        message=message,
    )


# ---------------------------------------------------------------------------
# Driver


def moment_init_counts(data: CountMatrix) -> Optional[np.ndarray]:
    """Moment-matching start from row proportions.

    The precision is the median over categories of (a - m2) / (m2 - a^2),
    where a and m2 are the first two moments of each category's proportion.
    Returns None when no category gives a positive finite precision.
    """
    counts = data.nonzero_rows().counts
    if counts.shape[0] < 2:
        return None
    props = counts / counts.sum(axis=1, keepdims=True)
    a = props.mean(axis=0)
    m2 = (props ** 2).mean(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = (a - m2) / (m2 - a ** 2)
    precision = precision[np.isfinite(precision) & (precision > 0)]
    if precision.size == 0 or np.any(a <= 0):
        return None
    return float(np.median(precision)) * a


def check_zero_columns(column_totals: np.ndarray) -> None:
    """A category never observed while others are pushes its alpha to zero."""
    empty = np.flatnonzero(np.asarray(column_totals) == 0)
    if empty.size:
        raise BoundaryEstimateError(
            "Categories with no observations have their MLE on the boundary alpha_k = 0",
            {"categories": empty.tolist()},
        )


def fit_dm(stats_or_data: DataLike, config: Optional[SolverConfig] = None) -> SolverReport:
    """Maximum-likelihood alpha for Dirichlet-multinomial data.

    Compressed methods accept either CompressedStats or row data (which is
    compressed first, with config.shards/workers). Naive methods need row
    data; all-zero rows are dropped before iterating. The objective is not
    concave everywhere, so the Newton methods take a fixed-point step on
    iterations where the Hessian is indefinite.

    Returns a report with converged=False when max_iters is reached.

    Raises:
        EmptyDataError: no row has a positive total.
        BoundaryEstimateError: a category is never observed, or alpha fell
            below config.alpha_floor.
        DivergenceError: alpha exceeded config.alpha_cap.
        ConfigurationError: a naive method or moment init was given only stats.
    """
    config = config or SolverConfig()
    start = time.perf_counter()

    counts: Optional[CountMatrix] = None
    stats: Optional[CompressedStats] = None
    if isinstance(stats_or_data, CompressedStats):
        if not config.is_compressed:
            raise ConfigurationError(
                f"Method {config.method} rescans rows and cannot run on compressed stats",
                {"method": config.method},
            )
        stats = stats_or_data
        n_categories, n_effective, n_rows = stats.n_categories, stats.n_effective, stats.n_rows
        column_totals = stats.column_totals()
    else:
        counts = _as_counts(stats_or_data)
        if config.is_compressed:
            stats = build_compressed_sharded(counts, config.shards, config.workers)
        n_categories, n_rows = counts.n_categories, counts.n_rows
        n_effective = int(np.count_nonzero(counts.row_totals))
        column_totals = counts.counts.sum(axis=0)

    if n_categories < 2:
        raise ValidationError("A Dirichlet-multinomial fit needs at least two categories")
    if n_effective == 0:
        raise EmptyDataError("No row has a positive total", {"rows": n_rows})
    check_zero_columns(column_totals)

    moments = None
    if config.init == "moments":
        if counts is None:
            raise ConfigurationError("Moment initialization needs row-level data, not compressed stats")
        moments = moment_init_counts(counts)
    alpha0 = initial_alpha(config, n_categories, moments)

    if config.method == "newton-compressed":
        assert stats is not None
        precompute = time.perf_counter() - start
        report = run_newton(
            alpha0,
            objective=lambda a: _compressed_objective(stats, a),
            gradient=lambda a: _compressed_gradient(stats, a),
            hessian=lambda a: _compressed_hessian(stats, a),
            config=config,
            method=config.method,
            precompute_seconds=precompute,
            fallback=lambda a: _fp_compressed(stats, a),
        )
    elif config.method == "fp-compressed":
        assert stats is not None
        precompute = time.perf_counter() - start
        report = run_fixed_point(
            alpha0,
            step=lambda a: _fp_compressed(stats, a),
            gradient=lambda a: _compressed_gradient(stats, a),
            objective=lambda a: _compressed_objective(stats, a),
            config=config,
            method=config.method,
            precompute_seconds=precompute,
        )
    else:
        assert counts is not None
        rows = counts.nonzero_rows().counts
        shards, workers = config.shards, config.workers
        precompute = time.perf_counter() - start
        if config.method == "fp-naive":
            report = run_fixed_point(
                alpha0,
                step=lambda a: _fp_naive(rows, a, shards, workers),
                gradient=lambda a: _naive_gradient(rows, a, shards, workers),
                objective=lambda a: _naive_objective(rows, a, shards, workers),
                config=config,
                method=config.method,
                precompute_seconds=precompute,
            )
        else:
            report = run_newton(
                alpha0,
                objective=lambda a: _naive_objective(rows, a, shards, workers),
                gradient=lambda a: _naive_gradient(rows, a, shards, workers),
                hessian=lambda a: _naive_hessian(rows, a, shards, workers),
                config=config,
                method=config.method,
                precompute_seconds=precompute,
                fallback=lambda a: _fp_naive(rows, a, shards, workers),
            )

    if report.converged:
        logger.info(
            "%s converged in %d iterations (precompute %.3fs, solve %.3fs)",
            report.method,
            report.iterations,
            report.timings.precompute_seconds,
            report.timings.solve_seconds,
        )
    return report
