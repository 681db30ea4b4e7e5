"""
Structured Newton step shared by the Dirichlet and Dirichlet-multinomial solvers.

Both Hessians have the form H = diag(d) + c * 1 1^T. By the Sherman-Morrison
identity

    H^-1 g = g/d - (1/d) * c * sum(g/d) / (1 + c * sum(1/d))

so a Newton step costs O(K) instead of a dense K x K solve.
"""

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .config import SolverConfig
from .exceptions import (
    BoundaryEstimateError,
    DivergenceError,
    SingularHessianError,
    ValidationError,
)
from .schemas import PhaseTimings, SolverReport
from .utils.logging import get_logger

logger = get_logger(__name__)

MIN_STEP = 2.0 ** -30
# relative slack when comparing objective values across a step
ASCENT_SLACK = 1e-14


@dataclass(frozen=True, eq=False)
class StructuredHessian:
    """H = diag(d) + c * ones((K, K))."""

    d: np.ndarray
    c: float

    def dense(self) -> np.ndarray:
        """Explicit K x K matrix, for diagnostics and tests."""
        k = self.d.shape[0]
        return np.diag(self.d) + self.c * np.ones((k, k))


@dataclass(frozen=True, eq=False)
class NewtonStep:
    """delta = H^-1 g; the update is alpha - delta."""

    delta: np.ndarray


@dataclass(frozen=True, eq=False)
class DampedUpdate:
    """Result of a backtracking step along -delta."""

    alpha: np.ndarray
    step_size: float
    objective: float
    stalled: bool


def solve_structured(h: StructuredHessian, g: np.ndarray) -> NewtonStep:
    """Solve (diag(d) + c 11^T) delta = g in O(K).

    Raises:
        SingularHessianError: a diagonal entry is zero, 1 + c * sum(1/d) vanishes,
            or an intermediate quantity is not finite.
    """
    d = np.asarray(h.d, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if d.shape != g.shape or d.ndim != 1:
        raise ValidationError("Hessian diagonal and gradient must be vectors of equal length")
    if np.any(d == 0) or not np.all(np.isfinite(d)) or not np.isfinite(h.c):
        raise SingularHessianError("Hessian diagonal has zero or non-finite entries", {"d": d.tolist(), "c": h.c})

    inv_d = 1.0 / d
    g_over_d = g * inv_d
    if h.c == 0:
        delta = g_over_d
    else:
        denom = 1.0 + h.c * inv_d.sum()
        if denom == 0 or not np.isfinite(denom):
            raise SingularHessianError("Structured Hessian is singular", {"denominator": float(denom)})
        delta = g_over_d - inv_d * (h.c * g_over_d.sum() / denom)

    if not np.all(np.isfinite(delta)):
        raise SingularHessianError("Newton step is not finite")
    return NewtonStep(delta)


def damped_update(
    alpha: np.ndarray,
    delta: np.ndarray,
    objective: Callable[[np.ndarray], float],
    current: Optional[float] = None,
    min_step: float = MIN_STEP,
) -> DampedUpdate:
    """Take alpha - t * delta for the largest t in {1, 1/2, 1/4, ...} >= min_step
    that keeps every component positive and does not lower the objective.

    If no step qualifies, alpha comes back unchanged with stalled=True; the
    caller decides whether that is fatal.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    if np.any(alpha <= 0):
        raise ValidationError("damped_update requires a strictly positive alpha")
    f0 = objective(alpha) if current is None else current
    if not np.any(delta):
        return DampedUpdate(alpha, 1.0, f0, False)

    slack = ASCENT_SLACK * max(1.0, abs(f0))
    t = 1.0
    while t >= min_step:
        candidate = alpha - t * delta
        if np.all(candidate > 0):
            f = objective(candidate)
            if np.isfinite(f) and f >= f0 - slack:
                return DampedUpdate(candidate, t, f, False)
        t *= 0.5

    logger.debug("Backtracking stalled below step %g", min_step)
    return DampedUpdate(alpha, 0.0, f0, True)


def check_alpha_bounds(alpha: np.ndarray, alpha_cap: float, alpha_floor: float, iteration: int) -> None:
    """Raise when alpha runs off to infinity or towards zero."""
    if np.max(alpha) > alpha_cap:
        raise DivergenceError(
            f"alpha exceeded cap {alpha_cap:g}; the likelihood appears unbounded",
            {"alpha": alpha.tolist(), "iteration": iteration},
        )
    if np.min(alpha) < alpha_floor:
        raise BoundaryEstimateError(
            f"alpha fell below floor {alpha_floor:g}; the maximum lies on the boundary",
            {"alpha": alpha.tolist(), "iteration": iteration, "category": int(np.argmin(alpha))},
        )


def is_negative_definite(h: StructuredHessian) -> bool:
    """diag(d) + c 11^T with every d_k < 0 is negative definite iff c <= 0 or 1 + c * sum(1/d) > 0."""
    d = np.asarray(h.d, dtype=np.float64)
    if not np.all(d < 0) or not np.all(np.isfinite(d)) or not np.isfinite(h.c):
        return False
    return h.c <= 0 or 1.0 + h.c * float(np.sum(1.0 / d)) > 0


def safeguard_delta(
    alpha: np.ndarray,
    g: np.ndarray,
    h: StructuredHessian,
    fallback: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> np.ndarray:
    """Ascent direction for when the Newton step cannot be trusted.

    With a fallback map the direction points at fallback(alpha). Otherwise
    the rank-one term is dropped and negative diagonal entries scale the
    gradient, which always ascends since g . delta = sum(g^2/d) < 0.
    """
    if fallback is not None:
        return alpha - fallback(alpha)
    d = np.where(np.asarray(h.d) < 0, h.d, -1.0)
    return g / d


def run_newton(
    alpha0: np.ndarray,
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    hessian: Callable[[np.ndarray], StructuredHessian],
    config: SolverConfig,
    method: str,
    precompute_seconds: float = 0.0,
    fallback: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> SolverReport:
    """Damped Newton ascent until ||g||_inf <= config.tol.

    Away from the optimum the Hessian may be indefinite, in which case
    -H^-1 g can point downhill. Such iterations, and iterations where
    backtracking along the Newton step stalls, take a safeguard step
    instead (see safeguard_delta).

    Stops early, with converged=False, at max_iters or when the safeguard
    step stalls too. Divergence and boundary estimates raise.
    """
    start = time.perf_counter()
    alpha = np.array(alpha0, dtype=np.float64)
    f = objective(alpha)
    g = gradient(alpha)
    grad_norm = float(np.max(np.abs(g)))
    iterations = 0
    safeguarded = 0
    message = None

    while grad_norm > config.tol:
        if iterations >= config.max_iters:
            message = f"reached max_iters={config.max_iters}"
            break
        h = hessian(alpha)
        update = None
        if is_negative_definite(h):
            delta = solve_structured(h, g).delta
            # the update is alpha - t * delta, so ascent needs g . delta < 0
            if float(g @ delta) < 0:
                update = damped_update(alpha, delta, objective, current=f, min_step=config.min_step)
        if update is None or update.stalled:
            safeguarded += 1
            delta = safeguard_delta(alpha, g, h, fallback)
            update = damped_update(alpha, delta, objective, current=f, min_step=config.min_step)
            if update.stalled:
                message = "backtracking stalled"
                break
        alpha, f = update.alpha, update.objective
        iterations += 1
        check_alpha_bounds(alpha, config.alpha_cap, config.alpha_floor, iterations)
        g = gradient(alpha)
        grad_norm = float(np.max(np.abs(g)))
        logger.debug("%s iter %d: F=%.12g |g|=%.3e t=%g", method, iterations, f, grad_norm, update.step_size)

    solve_seconds = time.perf_counter() - start
    converged = grad_norm <= config.tol
    if safeguarded:
        logger.debug("%s took %d safeguard steps", method, safeguarded)
    if not converged:
        logger.warning("%s stopped without converging: %s (|g|=%.3e)", method, message, grad_norm)
    return SolverReport(
        alpha_hat=alpha.tolist(),
        iterations=iterations,
        final_grad_norm=grad_norm,
        converged=converged,
        objective=float(f),
        method=method,
        tol=config.tol,
        timings=PhaseTimings(precompute_seconds=precompute_seconds, solve_seconds=solve_seconds),
        message=message,
    )
