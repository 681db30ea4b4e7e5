"""
Result schemas for solvers and benchmark sweeps.
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .models import DirichletParams


class PhaseTimings(BaseModel):
    """Wall-clock split between precomputation and the iterative phase."""
    precompute_seconds: float = Field(default=0.0, ge=0.0, description="Time spent compressing or scanning data")
    solve_seconds: float = Field(default=0.0, ge=0.0, description="Time spent iterating")

    @property
    def total_seconds(self) -> float:
        return self.precompute_seconds + self.solve_seconds


class SolverReport(BaseModel):
    """Outcome of a fit."""
    alpha_hat: List[float] = Field(description="Estimated concentration parameters")
    iterations: int = Field(ge=0, description="Number of accepted iterations")
    final_grad_norm: float = Field(description="Infinity norm of the gradient at alpha_hat")
    converged: bool = Field(description="Whether final_grad_norm <= tol")
    objective: float = Field(description="Objective value at alpha_hat")
    method: str = Field(description="Solver method used")
    tol: float = Field(description="Gradient tolerance the fit ran with")
    timings: PhaseTimings = Field(default_factory=PhaseTimings, description="Phase timings")
    message: Optional[str] = Field(default=None, description="Why the solver stopped early, if it did")

    @model_validator(mode="after")
    def check_convergence_flag(self) -> "SolverReport":
        """A converged report must actually meet its tolerance."""
        if self.converged and not self.final_grad_norm <= self.tol:
            raise ValueError("converged report must satisfy final_grad_norm <= tol")
        return self

    @property
    def params(self) -> DirichletParams:
        return DirichletParams(np.asarray(self.alpha_hat))

    @property
    def alpha(self) -> np.ndarray:
        return np.asarray(self.alpha_hat, dtype=np.float64)


class BenchRow(BaseModel):
    """One (sweep point, method) timing."""
    sweep: str = Field(description="Swept variable: N, M or K")
    value: int = Field(description="Value of the swept variable")
    method: str = Field(description="Solver method")
    precompute_seconds: float = Field(ge=0.0)
    solve_seconds: float = Field(ge=0.0)
    total_seconds: float = Field(ge=0.0)
    iterations: int = Field(ge=0)
    converged: bool
