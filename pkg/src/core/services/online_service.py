"""
Online estimation over a stream of count rows.

Rows are folded into running (U, v) tallies; every `refit_every` rows the
estimator refits alpha, warm-started from its previous estimate. Memory
stays O(MK) however many rows arrive.
"""

from dataclasses import dataclass
from typing import Any, Iterable, List, Optional

import numpy as np

from ..compressed import CompressedStats, build_compressed, merge
from ..config import SolverConfig
from ..dirichlet_multinomial import fit_dm
from ..exceptions import ConfigurationError
from ..schemas import SolverReport
from ..utils.logging import get_logger
from ..utils.validation import validate_counts

logger = get_logger(__name__)


@dataclass
class Snapshot:
    """Estimate after a refit."""
    rows_seen: int
    report: SolverReport

    def render(self) -> str:
        alpha = ",".join(repr(float(a)) for a in self.report.alpha_hat)
        return (
            f"snapshot: rows={self.rows_seen} iterations={self.report.iterations} "
            f"converged={'true' if self.report.converged else 'false'} alpha_hat={alpha}\n"
        )


class OnlineEstimator:
    """Streaming Dirichlet-multinomial fitter on compressed stats."""

    def __init__(self, n_categories: int, config: Optional[SolverConfig] = None, refit_every: int = 1000):
        self.config = config or SolverConfig()
        if not self.config.is_compressed:
            raise ConfigurationError(
                "Online estimation needs a compressed method",
                {"method": self.config.method},
            )
        if refit_every < 1:
            raise ConfigurationError("refit_every must be at least 1", {"refit_every": refit_every})
        self.refit_every = refit_every
        self.stats = CompressedStats.empty(n_categories)
        self.last_report: Optional[SolverReport] = None
        self._pending = 0

    @property
    def rows_seen(self) -> int:
        return self.stats.n_rows

    def add_row(self, row: Any) -> Optional[Snapshot]:
        """Fold one row in; returns a snapshot if this row triggered a refit."""
        self.stats.add_row(row)
        self._pending += 1
        if self._pending >= self.refit_every:
            return self.refit()
        return None

    def ingest(self, rows: Any) -> List[Snapshot]:
        """
        Fold a batch of rows in, refitting at every refit_every boundary.

        Args:
            rows: N x K counts

        Returns:
            Snapshots of the refits this batch triggered, in order
        """
        counts = validate_counts(rows, self.stats.n_categories)
        snapshots: List[Snapshot] = []
        start = 0
        while start < counts.shape[0]:
            take = min(self.refit_every - self._pending, counts.shape[0] - start)
            self.stats = merge(self.stats, build_compressed(counts[start : start + take]))
            self._pending += take
            start += take
            if self._pending >= self.refit_every:
                snapshot = self.refit()
                if snapshot is not None:
                    snapshots.append(snapshot)
        return snapshots

    def ingest_batches(self, batches: Iterable[Any]) -> List[Snapshot]:
        snapshots: List[Snapshot] = []
        for batch in batches:
            snapshots.extend(self.ingest(batch))
        return snapshots

    def refit(self) -> Optional[Snapshot]:
        """Fit alpha on everything seen so far.

        Skipped (returns None) while some category has never been observed,
        since its estimate would sit on the boundary.
        """
        self._pending = 0
        if self.stats.n_effective == 0 or np.any(self.stats.column_totals() == 0):
            logger.debug("Skipping refit at %d rows: not every category observed yet", self.rows_seen)
            return None
        config = self.config
        if self.last_report is not None:
            config = self.config.model_copy(update={"init": "custom", "init_alpha": self.last_report.alpha_hat})
        self.last_report = fit_dm(self.stats, config)
        logger.info(
            "Refit at %d rows: %d iterations, converged=%s",
            self.rows_seen,
            self.last_report.iterations,
            self.last_report.converged,
        )
        return Snapshot(self.rows_seen, self.last_report)

    def finalize(self) -> Optional[SolverReport]:
        """Refit if rows arrived since the last fit and return the latest report."""
        if self._pending or self.last_report is None:
            self.refit()
        return self.last_report
