"""
Pure Dirichlet distribution and its maximum-likelihood fit.

When each row of the data is itself a probability vector, the likelihood
depends on the data only through v_k = mean_n ln p_{n,k}. Dividing the
log-likelihood by N and dropping constants leaves

    F(alpha) = ln_gamma(sum alpha) - sum_k ln_gamma(alpha_k) + sum_k alpha_k v_k

whose Hessian is diag(-trigamma(alpha)) + trigamma(sum alpha) 11^T.
"""

import time
from typing import Any, Optional, Union

import numpy as np

from .config import SolverConfig
from .exceptions import DomainError, IterationLimitError, ValidationError
from .models import DirichletParams, DirichletSuffStat, ProbabilityMatrix, as_params
from .newton import StructuredHessian, run_newton
from .schemas import SolverReport
from .special import digamma, ln_gamma, trigamma
from .utils.logging import get_logger
from .utils.validation import SIMPLEX_TOLERANCE, validate_count_row

logger = get_logger(__name__)

AlphaLike = Union[DirichletParams, np.ndarray, list]


def dirichlet_log_pdf(alpha: AlphaLike, p: Any) -> float:
    """Log density of the point p under Dirichlet(alpha)."""
    a = as_params(alpha).alpha
    x = np.asarray(p, dtype=np.float64)
    if x.shape != a.shape:
        raise ValidationError("p and alpha must have the same length", {"p": x.shape, "alpha": a.shape})
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("Dirichlet density is evaluated only in the interior of the simplex")
    if abs(x.sum() - 1.0) > SIMPLEX_TOLERANCE:
        raise DomainError("p must sum to 1", {"sum": float(x.sum())})
    return float(ln_gamma(a.sum()) - np.sum(ln_gamma(a)) + np.sum((a - 1.0) * np.log(x)))


def dirichlet_log_likelihood(alpha: AlphaLike, data: ProbabilityMatrix) -> float:
    """Sum of dirichlet_log_pdf over every row."""
    a = as_params(alpha).alpha
    if data.n_categories != a.shape[0]:
        raise ValidationError("Data and alpha disagree on K")
    normalizer = ln_gamma(a.sum()) - np.sum(ln_gamma(a))
    return float(data.n_rows * normalizer + np.sum((a - 1.0) * np.log(data.rows)))


def dirichlet_mean(alpha: AlphaLike) -> np.ndarray:
    """Expected probability vector alpha / sum(alpha)."""
    a = as_params(alpha).alpha
    return a / a.sum()


def posterior_update(alpha: AlphaLike, counts: Any) -> DirichletParams:
    """Conjugate update: Dirichlet(alpha) prior plus multinomial counts c gives Dirichlet(alpha + c)."""
    params = as_params(alpha)
    c = validate_count_row(counts, params.n_categories)
    return DirichletParams(params.alpha + c)


def suff_stat(data: ProbabilityMatrix) -> DirichletSuffStat:
    """Mean log-probability per category, plus the moments used for initialization."""
    if data.n_rows == 0:
        raise ValidationError("Cannot compute a sufficient statistic from zero rows")
    logs = np.log(data.rows)
    mean = data.rows.mean(axis=0)
    first_variance = float(data.rows[:, 0].var())
    return DirichletSuffStat(logs.mean(axis=0), data.n_rows, mean=mean, first_variance=first_variance)


def dirichlet_objective(stat: DirichletSuffStat, alpha: np.ndarray) -> float:
    return float(ln_gamma(alpha.sum()) - np.sum(ln_gamma(alpha)) + alpha @ stat.v_log)


def dirichlet_gradient(stat: DirichletSuffStat, alpha: np.ndarray) -> np.ndarray:
    return digamma(alpha.sum()) - digamma(alpha) + stat.v_log


def dirichlet_hessian(stat: DirichletSuffStat, alpha: np.ndarray) -> StructuredHessian:
    return StructuredHessian(d=-trigamma(alpha), c=float(trigamma(alpha.sum())))


def moment_init(stat: DirichletSuffStat) -> Optional[np.ndarray]:
    """Method-of-moments start: precision from the first component's variance.

    Returns None when the moments do not determine a positive precision.
    """
    if stat.mean is None or stat.first_variance is None or stat.first_variance <= 0:
        return None
    m0 = stat.mean[0]
    precision = m0 * (1.0 - m0) / stat.first_variance - 1.0
    if not np.isfinite(precision) or precision <= 0:
        return None
    return precision * stat.mean


def initial_alpha(config: SolverConfig, n_categories: int, moments: Optional[np.ndarray] = None) -> np.ndarray:
    """Starting point selected by config.init."""
    if config.init == "custom":
        start = np.asarray(config.init_alpha, dtype=np.float64)
        if start.shape[0] != n_categories:
            raise ValidationError(
                "init_alpha length does not match the data",
                {"expected": n_categories, "actual": start.shape[0]},
            )
        return start
    if config.init == "moments":
        if moments is not None:
            return moments
        logger.info("Moment initialization undetermined; starting from ones")
    return np.ones(n_categories)


def fit_dirichlet(stat: DirichletSuffStat, config: Optional[SolverConfig] = None) -> SolverReport:
    """Newton-Raphson MLE of alpha from a pure Dirichlet sufficient statistic.

    Raises:
        DivergenceError: alpha grew past config.alpha_cap (e.g. identical rows).
        IterationLimitError: the gradient tolerance was not met; the partial
            report is attached.
    """
    config = config or SolverConfig()
    start = time.perf_counter()
    if stat.n_categories < 2:
        raise ValidationError("A Dirichlet fit needs at least two categories")
    if not np.all(np.isfinite(stat.v_log)) or np.any(stat.v_log > 0):
        raise DomainError("Mean log-probabilities must be finite and non-positive")
    alpha0 = initial_alpha(config, stat.n_categories, moment_init(stat) if config.init == "moments" else None)
    precompute = time.perf_counter() - start

    report = run_newton(
        alpha0,
        objective=lambda a: dirichlet_objective(stat, a),
        gradient=lambda a: dirichlet_gradient(stat, a),
        hessian=lambda a: dirichlet_hessian(stat, a),
        config=config,
        method="newton-dirichlet",
        precompute_seconds=precompute,
    )
    if not report.converged:
        raise IterationLimitError(
            f"Dirichlet fit did not converge: {report.message}",
            report=report,
            details={"final_grad_norm": report.final_grad_norm, "iterations": report.iterations},
        )
    logger.info("Dirichlet fit converged in %d iterations", report.iterations)
    return report
