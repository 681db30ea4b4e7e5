"""
Fitting service used by the CLI.

This service handles:
- Loading datasets and stats files from disk
- Merging several inputs into one set of compressed stats
- Running Dirichlet-multinomial or pure Dirichlet fits
- Rendering fit reports
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Union

import numpy as np

from ..compressed import CompressedStats, build_compressed_sharded, merge_all
from ..config import SolverConfig
from ..dirichlet import fit_dirichlet, suff_stat
from ..dirichlet_multinomial import fit_dm
from ..exceptions import ConfigurationError, IterationLimitError
from ..io import DatasetFormat, format_report, load_counts, load_probabilities
from ..models import CountMatrix
from ..schemas import SolverReport
from ..utils.logging import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]


@dataclass
class FitOutcome:
    """A report plus the dataset shape it was fitted on."""
    report: SolverReport
    model: str
    rows: int
    rows_effective: int
    categories: int
    max_total: int

    def render(self) -> str:
        return format_report(
            self.report,
            model=self.model,
            rows=self.rows,
            rows_effective=self.rows_effective,
            categories=self.categories,
            max_total=self.max_total,
        )


class FitService:
    """Loads inputs and runs fits with one SolverConfig."""

    def __init__(self, config: Optional[SolverConfig] = None):
        self.config = config or SolverConfig()

    def fit_dm_file(self, path: PathLike, fmt: DatasetFormat = "auto") -> FitOutcome:
        """
        Fit a Dirichlet-multinomial to a count dataset or stats file.

        Args:
            path: Dense, sparse or stats file
            fmt: File format, detected from the content when "auto"

        Returns:
            The report and dataset shape
        """
        data = load_counts(path, fmt)
        logger.info("Loaded %s", path)
        return self.fit_dm_data(data)

    def fit_dm_data(self, data: Union[CountMatrix, CompressedStats]) -> FitOutcome:
        report = fit_dm(data, self.config)
        if isinstance(data, CompressedStats):
            return FitOutcome(
                report=report,
                model="dm",
                rows=data.n_rows,
                rows_effective=data.n_effective,
                categories=data.n_categories,
                max_total=data.max_total,
            )
        totals = data.row_totals
        return FitOutcome(
            report=report,
            model="dm",
            rows=data.n_rows,
            rows_effective=int(np.count_nonzero(totals)),
            categories=data.n_categories,
            max_total=int(totals.max()) if data.n_rows else 0,
        )

    def fit_dirichlet_file(self, path: PathLike) -> FitOutcome:
        """
        Fit a pure Dirichlet to a file of probability vectors.

        Args:
            path: Dense file of rows on the simplex

        Returns:
            The report and dataset shape (max_total is 0). A fit that hits
            max_iters comes back with converged=False, as for fit_dm_file.
        """
        data = load_probabilities(path)
        try:
            report = fit_dirichlet(suff_stat(data), self.config)
        except IterationLimitError as e:
            if e.report is None:
                raise
            report = e.report
        return FitOutcome(
            report=report,
            model="dirichlet",
            rows=data.n_rows,
            rows_effective=data.n_rows,
            categories=data.n_categories,
            max_total=0,
        )

    def compress_files(self, paths: Iterable[PathLike], fmt: DatasetFormat = "auto") -> CompressedStats:
        """
        Compress and merge several datasets or stats files.

        Args:
            paths: Inputs; each may be a dataset or a stats file
            fmt: Format applied to every input, or "auto" per file

        Returns:
            Stats of the concatenated rows
        """
        parts: List[CompressedStats] = []
        for path in paths:
            data = load_counts(path, fmt)
            if isinstance(data, CountMatrix):
                data = build_compressed_sharded(data, self.config.shards, self.config.workers)
            parts.append(data)
            logger.debug("Compressed %s into %r", path, data)
        if not parts:
            raise ConfigurationError("At least one input is required")
        return merge_all(parts)
