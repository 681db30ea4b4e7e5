"""
Configuration management for FastDM.

Solver, sampler and benchmark settings are pydantic models. Settings left
unset fall back to FASTDM_* environment variables (a .env file is honoured).
"""

import os
from typing import Any, List, Literal, Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Load environment variables
load_dotenv()

ENV_PREFIX = "FASTDM_"

SolverMethod = Literal["newton-compressed", "fp-compressed", "fp-naive", "newton-naive"]
METHODS: Tuple[str, ...] = ("newton-compressed", "fp-compressed", "fp-naive", "newton-naive")
COMPRESSED_METHODS = frozenset({"newton-compressed", "fp-compressed"})

InitKind = Literal["ones", "custom", "moments"]


def _parse_float_list(value: Any) -> Any:
    if isinstance(value, str):
        parts = [p for p in value.replace(" ", "").split(",") if p]
        return [float(p) for p in parts]
    return value


def _env_defaults(model: type, values: Any) -> Any:
    """Fill unset fields from FASTDM_<FIELD> environment variables."""
    if not isinstance(values, dict):
        return values
    values = dict(values)
    for name in model.model_fields:
        if name in values and values[name] is not None:
            continue
        env_val = os.getenv(f"{ENV_PREFIX}{name.upper()}")
        if env_val is not None and env_val != "":
            values[name] = env_val
    return values


class SolverConfig(BaseModel):
    """Settings shared by every fitting method."""

    model_config = ConfigDict(
        validate_assignment=True,
        extra="ignore"
    )

    tol: float = Field(
        default=1e-10,
        description="Stop once the infinity norm of the gradient is at most this"
    )

    max_iters: int = Field(
        default=1000,
        description="Maximum number of iterations"
    )

    method: SolverMethod = Field(
        default="newton-compressed",
        description="Fitting algorithm for Dirichlet-multinomial data"
    )

    init: InitKind = Field(
        default="ones",
        description="Starting point: all ones, a custom vector, or moment matching"
    )

    init_alpha: Optional[List[float]] = Field(
        default=None,
        description="Starting alpha when init is 'custom'"
    )

    alpha_cap: float = Field(
        default=1e7,
        description="Any alpha component above this signals an unbounded likelihood"
    )

    alpha_floor: float = Field(
        default=1e-12,
        description="Any alpha component below this signals a boundary estimate"
    )

    min_step: float = Field(
        default=2.0 ** -30,
        description="Smallest backtracking step before a Newton iteration stalls"
    )

    shards: int = Field(
        default=1,
        description="Row shards for compression and naive row sums"
    )

    workers: int = Field(
        default=1,
        description="Threads used to process shards"
    )

    log_level: str = Field(
        default="INFO",
        description="Logging level"
    )

    @model_validator(mode="before")
    @classmethod
    def load_env_defaults(cls, values: Any) -> Any:
        """Load unset settings from the environment."""
        values = _env_defaults(cls, values)
        if isinstance(values, dict) and values.get("init_alpha") is not None and "init" not in values:
            values["init"] = "custom"
        return values

    @field_validator("init_alpha", mode="before")
    @classmethod
    def parse_init_alpha(cls, v: Any) -> Any:
        """Accept a comma-separated string."""
        return _parse_float_list(v)

    @field_validator("init_alpha")
    @classmethod
    def validate_init_alpha(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        """Validate custom starting point."""
        if v is not None and (len(v) < 2 or any(not (a > 0) for a in v)):
            raise ValueError("init_alpha needs at least two strictly positive entries")
        return v

    @field_validator("tol", "alpha_cap", "alpha_floor", "min_step")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Tolerances and bounds must be positive."""
        if not v > 0:
            raise ValueError("must be positive")
        return v

    @field_validator("max_iters", "shards", "workers")
    @classmethod
    def validate_count(cls, v: int) -> int:
        """Counts must be at least one."""
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
        if v.upper() not in valid_levels:
            raise ValueError(f"Log level must be one of: {valid_levels}")
        return v.upper()

    @model_validator(mode="after")
    def validate_init(self) -> "SolverConfig":
        """A custom init needs a vector; bounds must be ordered."""
        if self.init == "custom" and self.init_alpha is None:
            raise ValueError("init='custom' requires init_alpha")
        if self.alpha_floor >= self.alpha_cap:
            raise ValueError("alpha_floor must be below alpha_cap")
        return self

    @property
    def is_compressed(self) -> bool:
        return self.method in COMPRESSED_METHODS


class RowTotalSpec(BaseModel):
    """How many draws each synthesized row gets."""

    kind: Literal["fixed", "uniform", "poisson"] = Field(default="fixed")
    value: int = Field(default=10, ge=0, description="Row total for kind='fixed'")
    low: int = Field(default=0, ge=0, description="Inclusive lower bound for kind='uniform'")
    high: int = Field(default=0, ge=0, description="Inclusive upper bound for kind='uniform'")
    mean: float = Field(default=0.0, ge=0.0, description="Mean for kind='poisson'")

    @model_validator(mode="after")
    def validate_bounds(self) -> "RowTotalSpec":
        """Uniform bounds must be ordered."""
        if self.kind == "uniform" and self.low > self.high:
            raise ValueError("uniform row totals need low <= high")
        return self

    @classmethod
    def parse(cls, text: str) -> "RowTotalSpec":
        """Parse '10', 'uniform:LO:HI' or 'poisson:MEAN'."""
        parts = text.strip().split(":")
        if len(parts) == 1:
            return cls(kind="fixed", value=int(parts[0]))
        if parts[0] == "uniform" and len(parts) == 3:
            return cls(kind="uniform", low=int(parts[1]), high=int(parts[2]))
        if parts[0] == "poisson" and len(parts) == 2:
            return cls(kind="poisson", mean=float(parts[1]))
        raise ValueError(f"Unrecognised row total spec '{text}'")

    def describe(self) -> str:
        if self.kind == "fixed":
            return str(self.value)
        if self.kind == "uniform":
            return f"uniform:{self.low}:{self.high}"
        return f"poisson:{self.mean:g}"


class SynthSpec(BaseModel):
    """Synthetic Dirichlet-multinomial dataset description."""

    model_config = ConfigDict(validate_assignment=True)

    alpha: List[float] = Field(description="Dirichlet parameter the rows are drawn from")
    n_rows: int = Field(ge=1, description="Number of rows N")
    row_total: RowTotalSpec = Field(default_factory=RowTotalSpec, description="Per-row draw count")
    seed: int = Field(default=0, ge=0, lt=2 ** 64, description="64-bit seed")

    @field_validator("alpha", mode="before")
    @classmethod
    def parse_alpha(cls, v: Any) -> Any:
        """Accept a comma-separated string."""
        return _parse_float_list(v)

    @field_validator("alpha")
    @classmethod
    def validate_alpha(cls, v: List[float]) -> List[float]:
        """alpha must have K >= 2 positive entries."""
        if len(v) < 2 or any(not (a > 0) for a in v):
            raise ValueError("alpha needs at least two strictly positive entries")
        return v

    @field_validator("row_total", mode="before")
    @classmethod
    def parse_row_total(cls, v: Any) -> Any:
        """Accept an int or the compact string form."""
        if isinstance(v, bool):
            raise ValueError("row_total must be an integer or spec")
        if isinstance(v, int):
            return RowTotalSpec(kind="fixed", value=v)
        if isinstance(v, str):
            return RowTotalSpec.parse(v)
        return v


class BenchConfig(BaseModel):
    """One runtime sweep."""

    sweep: Literal["N", "M", "K"] = Field(description="Variable being swept")
    start: int = Field(ge=1, description="First sweep value")
    stop: int = Field(ge=1, description="Last sweep value (inclusive)")
    factor: float = Field(default=2.0, description="Geometric growth between sweep points")
    methods: List[SolverMethod] = Field(
        default_factory=lambda: ["newton-compressed", "fp-compressed", "fp-naive", "newton-naive"],
        description="Methods timed at each point"
    )
    repeats: int = Field(default=3, ge=1, description="Timed runs per point; the median is reported")
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    alpha: Optional[List[float]] = Field(default=None, description="Dirichlet parameter for N and M sweeps")
    n_rows: int = Field(default=5000, ge=1, description="N when it is held fixed")
    row_total: Optional[int] = Field(
        default=None, ge=0, description="M when it is held fixed (10 for N sweeps, 50 for K sweeps)"
    )
    tol: float = Field(default=1e-10, gt=0)
    max_iters: int = Field(default=1000, ge=1)

    @field_validator("alpha", mode="before")
    @classmethod
    def parse_alpha(cls, v: Any) -> Any:
        """Accept a comma-separated string."""
        return _parse_float_list(v)

    @field_validator("factor")
    @classmethod
    def validate_factor(cls, v: float) -> float:
        """The sweep must grow."""
        if not v > 1:
            raise ValueError("factor must be greater than 1")
        return v

    @model_validator(mode="after")
    def validate_range(self) -> "BenchConfig":
        """start must not exceed stop."""
        if self.start > self.stop:
            raise ValueError("start must not exceed stop")
        if self.sweep == "K" and self.start < 2:
            raise ValueError("a K sweep must start at 2 or more")
        return self

    def points(self) -> List[int]:
        """Sweep values start, start*factor, ... up to stop, rounded and deduplicated."""
        values: List[int] = []
        x = float(self.start)
        while round(x) <= self.stop:
            v = int(round(x))
            if not values or v != values[-1]:
                values.append(v)
            x *= self.factor
        return values


def get_config() -> SolverConfig:
    """Get the solver configuration from environment variables."""
    return SolverConfig()
