"""
FastDM CLI - fit, compress, sample and benchmark from the shell.

Supports:
- Fitting Dirichlet-multinomial or pure Dirichlet data
- Exporting compressed stats (and merging shard outputs)
- Synthesizing datasets
- Runtime sweeps as CSV

Reports and data go to stdout; logs and errors go to stderr.
"""

import functools
import sys
from typing import Any, Callable, Dict, List, Optional

import click
from dotenv import load_dotenv
from pydantic import ValidationError as PydanticValidationError

# Load environment variables
load_dotenv()

from . import __version__
from .core.bench import run_bench, write_csv
from .core.config import METHODS, BenchConfig, SolverConfig, SynthSpec, get_config
from .core.exceptions import ConfigurationError, FastDMError
from .core.io import load_counts, write_dense, write_sparse, write_stats
from .core.models import CountMatrix
from .core.sampling import synthesize
from .core.services import FitOutcome, FitService, OnlineEstimator
from .core.utils.logging import get_logger, setup_logging

logger = get_logger(__name__)

EXIT_NOT_CONVERGED = 3
EXIT_USAGE = 2
EXIT_UNEXPECTED = 1

DEFAULT_SWEEP_RANGES = {"N": (100, 6400), "M": (10, 320), "K": (2, 64)}


def handle_errors(fn: Callable[..., Any]) -> Callable[..., Any]:
    """Map FastDM errors to their exit codes with a one-line message on stderr."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except FastDMError as e:
            logger.debug("%s details: %s", type(e).__name__, e.details)
            click.echo(f"Error: {e.message}", err=True)
            sys.exit(e.exit_code)
        except PydanticValidationError as e:
            click.echo(f"Error: invalid option values\n{e}", err=True)
            sys.exit(EXIT_USAGE)
        except click.ClickException:
            raise
        except Exception as e:
            logger.exception("Unexpected error")
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_UNEXPECTED)

    return wrapper


def _solver_config(**options: Any) -> SolverConfig:
    """SolverConfig from the options that were given; the rest come from the environment."""
    values: Dict[str, Any] = {k: v for k, v in options.items() if v is not None}
    init = values.pop("init", None)
    if init is not None:
        if init in ("ones", "moments"):
            values["init"] = init
        else:
            values["init"] = "custom"
            values["init_alpha"] = init
    return SolverConfig(**values)


# CLI Commands
@click.group()
@click.option("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR or CRITICAL")
@click.option("--log-file", default=None, type=click.Path(dir_okay=False), help="Also write logs to this file")
def cli(log_level: Optional[str], log_file: Optional[str]) -> None:
    """FastDM - fast maximum-likelihood fitting of Dirichlet and Dirichlet-multinomial models"""
    setup_logging(level=(log_level or get_config().log_level).upper(), log_file=log_file)


@cli.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--model", type=click.Choice(["dm", "dirichlet"]), default="dm", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["auto", "dense", "sparse", "stats"]), default="auto",
              show_default=True, help="Input format (dm model only)")
@click.option("--method", type=click.Choice(list(METHODS)), default=None, help="Fitting algorithm")
@click.option("--tol", type=float, default=None, help="Gradient infinity-norm tolerance")
@click.option("--max-iters", type=int, default=None, help="Iteration limit")
@click.option("--init", default=None, help="'ones', 'moments' or a comma-separated alpha")
@click.option("--alpha-cap", type=float, default=None, help="Divergence threshold")
@click.option("--alpha-floor", type=float, default=None, help="Boundary threshold")
@click.option("--shards", type=int, default=None, help="Row shards for compression and naive sums")
@click.option("--workers", type=int, default=None, help="Threads for shards")
@click.option("--refit-every", type=int, default=None, help="Stream rows and refit every R rows")
@handle_errors
def fit(
    input_path: str,
    model: str,
    fmt: str,
    method: Optional[str],
    tol: Optional[float],
    max_iters: Optional[int],
    init: Optional[str],
    alpha_cap: Optional[float],
    alpha_floor: Optional[float],
    shards: Optional[int],
    workers: Optional[int],
    refit_every: Optional[int],
) -> None:
    """Fit alpha and print a key: value report"""
    config = _solver_config(
        method=method,
        tol=tol,
        max_iters=max_iters,
        init=init,
        alpha_cap=alpha_cap,
        alpha_floor=alpha_floor,
        shards=shards,
        workers=workers,
    )
    service = FitService(config)

    if model == "dirichlet":
        outcome = service.fit_dirichlet_file(input_path)
    elif refit_every is not None:
        outcome = _fit_streaming(service, input_path, fmt, refit_every)
    else:
        outcome = service.fit_dm_file(input_path, fmt)  # type: ignore[arg-type]

    click.echo(outcome.render(), nl=False)
    if not outcome.report.converged:
        click.echo(f"Error: not converged ({outcome.report.message})", err=True)
        sys.exit(EXIT_NOT_CONVERGED)


def _fit_streaming(service: FitService, input_path: str, fmt: str, refit_every: int) -> FitOutcome:
    data = load_counts(input_path, fmt)  # type: ignore[arg-type]
    if not isinstance(data, CountMatrix):
        raise ConfigurationError("--refit-every needs row data, not a stats file")
    estimator = OnlineEstimator(data.n_categories, service.config, refit_every=refit_every)
    for snapshot in estimator.ingest(data.counts):
        click.echo(snapshot.render(), nl=False)
    final = estimator.finalize()
    if final is None:
        # some category was never observed; the batch fit raises the diagnostic
        return service.fit_dm_data(data)
    summary = estimator.stats
    return FitOutcome(
        report=final,
        model="dm",
        rows=summary.n_rows,
        rows_effective=summary.n_effective,
        categories=summary.n_categories,
        max_total=summary.max_total,
    )


@cli.command()
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["auto", "dense", "sparse", "stats"]), default="auto",
              show_default=True)
@click.option("--shards", type=int, default=1, show_default=True, help="Row shards per input")
@click.option("--workers", type=int, default=1, show_default=True, help="Threads for shards")
@click.option("-o", "--output", type=click.File("w"), default="-", help="Stats file (stdout by default)")
@handle_errors
def stats(inputs: List[str], fmt: str, shards: int, workers: int, output: Any) -> None:
    """Compress datasets (or merge stats files) into one stats file"""
    service = FitService(SolverConfig(shards=shards, workers=workers))
    merged = service.compress_files(inputs, fmt)  # type: ignore[arg-type]
    write_stats(merged, output)
    logger.info("Wrote %r", merged)


@cli.command()
@click.option("--alpha", required=True, help="Comma-separated Dirichlet parameter")
@click.option("--rows", type=int, required=True, help="Number of rows N")
@click.option("--row-total", default="10", show_default=True, help="M, 'uniform:LO:HI' or 'poisson:MEAN'")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["dense", "sparse"]), default="dense", show_default=True)
@click.option("--workers", type=int, default=1, show_default=True, help="Threads for generation")
@click.option("-o", "--output", type=click.File("w"), default="-", help="Dataset file (stdout by default)")
@handle_errors
def sample(alpha: str, rows: int, row_total: str, seed: int, fmt: str, workers: int, output: Any) -> None:
    """Synthesize a Dirichlet-multinomial dataset"""
    try:
        spec = SynthSpec(alpha=alpha, n_rows=rows, row_total=row_total, seed=seed)
    except (PydanticValidationError, ValueError) as e:
        raise click.BadParameter(str(e)) from e
    data = synthesize(spec, workers=workers)
    (write_sparse if fmt == "sparse" else write_dense)(data, output)
    click.echo(
        f"sampled rows={spec.n_rows} alpha={','.join(repr(a) for a in spec.alpha)} "
        f"row_total={spec.row_total.describe()} seed={spec.seed}",
        err=True,
    )


@cli.command()
@click.option("--sweep", type=click.Choice(["N", "M", "K"]), required=True)
@click.option("--from", "start", type=int, default=None, help="First sweep value")
@click.option("--to", "stop", type=int, default=None, help="Last sweep value")
@click.option("--factor", type=float, default=2.0, show_default=True)
@click.option("--methods", default=",".join(METHODS), show_default=True, help="Comma-separated methods")
@click.option("--repeats", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--alpha", default=None, help="Dirichlet parameter for N and M sweeps")
@click.option("--rows", type=int, default=5000, show_default=True, help="N when held fixed")
@click.option("--row-total", type=int, default=None, help="M when held fixed")
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.option("--max-iters", type=int, default=1000, show_default=True)
@handle_errors
def bench(
    sweep: str,
    start: Optional[int],
    stop: Optional[int],
    factor: float,
    methods: str,
    repeats: int,
    seed: int,
    alpha: Optional[str],
    rows: int,
    row_total: Optional[int],
    tol: float,
    max_iters: int,
) -> None:
    """Time every method across a sweep and print CSV"""
    default_start, default_stop = DEFAULT_SWEEP_RANGES[sweep]
    config = BenchConfig(
        sweep=sweep,
        start=start if start is not None else default_start,
        stop=stop if stop is not None else default_stop,
        factor=factor,
        methods=[m.strip() for m in methods.split(",") if m.strip()],
        repeats=repeats,
        seed=seed,
        alpha=alpha,
        n_rows=rows,
        row_total=row_total,
        tol=tol,
        max_iters=max_iters,
    )
    written = write_csv(run_bench(config), sys.stdout)
    logger.info("Wrote %d benchmark rows", written)


@cli.command()
def version() -> None:
    """Show version information"""
    click.echo(f"FastDM v{__version__}")


def main() -> None:
    cli(prog_name="fastdm")


if __name__ == "__main__":
    main()
