"""
Runtime sweeps over N, M or K.

Default setups:
    N sweep  alpha = [3, 1, 2], row total 10
    M sweep  alpha = [3, 1, 2], N = 5000
    K sweep  alpha_k = 1/K, row total 50, N = 5000

Every (point, method) pair is run once as a warm-up and then `repeats`
times; the median of each phase is reported.
"""

import csv
import statistics
from typing import Iterator, List, TextIO, Tuple

import numpy as np

from .config import BenchConfig, SolverConfig, SynthSpec
from .dirichlet_multinomial import fit_dm
from .exceptions import DivergenceError, NumericalError
from .models import CountMatrix
from .sampling import synthesize
from .schemas import BenchRow, SolverReport
from .utils.logging import get_logger

logger = get_logger(__name__)

CSV_COLUMNS = (
    "sweep",
    "value",
    "method",
    "precompute_seconds",
    "solve_seconds",
    "total_seconds",
    "iterations",
    "converged",
)

DEFAULT_ALPHA = (3.0, 1.0, 2.0)
DEFAULT_ROW_TOTAL = 10
DEFAULT_K_SWEEP_ROW_TOTAL = 50


def dataset_for(config: BenchConfig, value: int) -> CountMatrix:
    """Synthesize the dataset for one sweep point."""
    alpha: Tuple[float, ...] = tuple(config.alpha) if config.alpha else DEFAULT_ALPHA
    n_rows = config.n_rows
    if config.sweep == "N":
        n_rows = value
        row_total = config.row_total if config.row_total is not None else DEFAULT_ROW_TOTAL
    elif config.sweep == "M":
        row_total = value
    else:
        alpha = tuple(np.full(value, 1.0 / value))
        row_total = config.row_total if config.row_total is not None else DEFAULT_K_SWEEP_ROW_TOTAL
    spec = SynthSpec(alpha=list(alpha), n_rows=n_rows, row_total=row_total, seed=config.seed)
    return synthesize(spec)


def time_method(data: CountMatrix, method: str, config: BenchConfig) -> Tuple[float, float, SolverReport]:
    """(median precompute, median solve, last report) over config.repeats runs after one warm-up."""
    solver = SolverConfig(method=method, tol=config.tol, max_iters=config.max_iters)
    fit_dm(data, solver)
    precompute: List[float] = []
    solve: List[float] = []
    report = None
    for _ in range(config.repeats):
        report = fit_dm(data, solver)
        precompute.append(report.timings.precompute_seconds)
        solve.append(report.timings.solve_seconds)
    assert report is not None
    return statistics.median(precompute), statistics.median(solve), report


def run_bench(config: BenchConfig) -> Iterator[BenchRow]:
    """One BenchRow per (sweep point, method), in sweep order."""
    for value in config.points():
        data = dataset_for(config, value)
        for method in config.methods:
            try:
                precompute, solve, report = time_method(data, method, config)
                iterations, converged = report.iterations, report.converged
            except (DivergenceError, NumericalError) as e:
                logger.warning("%s at %s=%d failed: %s", method, config.sweep, value, e.message)
                precompute, solve, iterations, converged = 0.0, 0.0, 0, False
            logger.info("%s=%d %s: precompute %.4fs solve %.4fs", config.sweep, value, method, precompute, solve)
            yield BenchRow(
                sweep=config.sweep,
                value=value,
                method=method,
                precompute_seconds=precompute,
                solve_seconds=solve,
                total_seconds=precompute + solve,
                iterations=iterations,
                converged=converged,
            )


def write_csv(rows: Iterator[BenchRow], stream: TextIO) -> int:
    """Stream rows as CSV with a header; returns the number of rows written."""
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    count = 0
    for row in rows:
        record = row.model_dump()
        record["converged"] = "true" if row.converged else "false"
        for key in ("precompute_seconds", "solve_seconds", "total_seconds"):
            record[key] = f"{record[key]:.6f}"
        writer.writerow(record)
        stream.flush()
        count += 1
    return count
