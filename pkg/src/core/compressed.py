"""
Compressed sufficient statistics for Dirichlet-multinomial data.

A count dataset D (N rows, K categories) is reduced to

    u[k, m] = number of rows whose count in column k exceeds m
    v[m]    = number of rows whose total exceeds m

for m = 0 .. M-1, where M is the largest row total. The objective, gradient
and Hessian of the Dirichlet-multinomial likelihood only need (U, v), so a
fit costs O(MK) per iteration no matter how many rows were ingested.

Tallies are additive: stats of disjoint row sets merge by zero-padded
elementwise addition, which makes sharded and streaming ingestion exact.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Iterable, List, Optional, Sequence, Union

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    StatsFormatError,
    TallyOverflowError,
    ValidationError,
)
from .models import CountMatrix
from .utils.logging import get_logger
from .utils.validation import validate_count_row, validate_counts

logger = get_logger(__name__)

STATS_FORMAT_VERSION = 1
STATS_MAGIC = "fastdm-stats"

_INT64_MAX = np.iinfo(np.int64).max
_MIN_CAPACITY = 8


class CompressedStats:
    """The tally matrix U (K x M), tally vector v (M) and row counters.

    U is held row-major in a buffer wider than M so that add_row can widen it
    with amortized doubling. The `U` and `v` properties are read-only views of
    the live width. A single instance is owned by one writer; share it only
    for reading.
    """

    def __init__(
        self,
        n_categories: int,
        u: Optional[np.ndarray] = None,
        v: Optional[np.ndarray] = None,
        n_rows: int = 0,
        n_effective: int = 0,
    ):
        if n_categories < 1:
            raise ValidationError("CompressedStats needs at least one category")
        u_arr = np.zeros((n_categories, 0), dtype=np.int64) if u is None else np.asarray(u, dtype=np.int64)
        v_arr = np.zeros(0, dtype=np.int64) if v is None else np.asarray(v, dtype=np.int64)
        if u_arr.ndim != 2 or u_arr.shape[0] != n_categories or v_arr.ndim != 1 or u_arr.shape[1] != v_arr.shape[0]:
            raise ValidationError(
                "U must be K x M and v must have length M",
                {"u_shape": u_arr.shape, "v_shape": v_arr.shape, "K": n_categories},
            )
        width = v_arr.shape[0]
        capacity = max(width, _MIN_CAPACITY)
        self._u = np.zeros((n_categories, capacity), dtype=np.int64)
        self._v = np.zeros(capacity, dtype=np.int64)
        self._u[:, :width] = u_arr
        self._v[:width] = v_arr
        self._width = width
        self.n_categories = n_categories
        self.n_rows = int(n_rows)
        self.n_effective = int(n_effective)

    @classmethod
    def empty(cls, n_categories: int) -> "CompressedStats":
        return cls(n_categories)

    @property
    def U(self) -> np.ndarray:
        view = self._u[:, : self._width]
        view.flags.writeable = False
        return view

    @property
    def v(self) -> np.ndarray:
        view = self._v[: self._width]
        view.flags.writeable = False
        return view

    @property
    def max_total(self) -> int:
        """M, the largest row total seen so far."""
        return self._width

    @property
    def total_count(self) -> int:
        """Sum of every count ingested; equals sum(v)."""
        return int(self.v.sum())

    def column_totals(self) -> np.ndarray:
        """Per-category totals; equal to U summed over m."""
        return self.U.sum(axis=1)

    def count_histogram(self, k: int) -> np.ndarray:
        """Entry j is the number of rows whose column-k count equals j (j >= 1).

        Entry 0 is left at zero: rows with a zero in column k are not
        recoverable from U alone.
        """
        u_k = self.U[k]
        hist = np.zeros(self._width + 1, dtype=np.int64)
        if self._width:
            hist[1:] = u_k - np.append(u_k[1:], 0)
        return hist

    def copy(self) -> "CompressedStats":
        return CompressedStats(self.n_categories, self.U.copy(), self.v.copy(), self.n_rows, self.n_effective)

    def _ensure_width(self, width: int) -> None:
        capacity = self._v.shape[0]
        if width <= capacity:
            return
        new_capacity = max(width, 2 * capacity)
        u = np.zeros((self.n_categories, new_capacity), dtype=np.int64)
        v = np.zeros(new_capacity, dtype=np.int64)
        u[:, : self._width] = self._u[:, : self._width]
        v[: self._width] = self._v[: self._width]
        self._u, self._v = u, v

    def add_row(self, row: Any) -> "CompressedStats":
        """Fold one count row into the tallies in place and return self."""
        counts = validate_count_row(row, self.n_categories)
        if self.n_rows + 1 > _INT64_MAX:
            raise TallyOverflowError("Row counter would overflow int64")
        self.n_rows += 1
        total = int(counts.sum())
        if total == 0:
            return self
        self._ensure_width(total)
        for k, c in enumerate(counts):
            if c:
                self._u[k, :c] += 1
        self._v[:total] += 1
        self._width = max(self._width, total)
        self.n_effective += 1
        return self

    def check_invariants(self) -> None:
        """Raise StatsFormatError if the tallies are not internally consistent."""
        U, v = self.U, self.v
        problems = []
        if self.n_effective > self.n_rows:
            problems.append("N_effective exceeds N")
        if self._width == 0:
            if self.n_effective != 0:
                problems.append("M == 0 requires N_effective == 0")
        else:
            if v[0] != self.n_effective:
                problems.append("v[0] must equal N_effective")
            if v[-1] <= 0:
                problems.append("v[M-1] must be positive")
            if np.any(np.diff(v) > 0):
                problems.append("v must be non-increasing")
            if np.any(np.diff(U, axis=1) > 0):
                problems.append("rows of U must be non-increasing")
            if np.any(U > v[np.newaxis, :]):
                problems.append("u[k, m] must not exceed v[m]")
            if np.any(U < 0):
                problems.append("tallies must be non-negative")
        if problems:
            raise StatsFormatError("; ".join(problems), details={"K": self.n_categories, "M": self._width})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompressedStats):
            return NotImplemented
        return (
            self.n_categories == other.n_categories
            and self.n_rows == other.n_rows
            and self.n_effective == other.n_effective
            and self._width == other._width
            and np.array_equal(self.U, other.U)
            and np.array_equal(self.v, other.v)
        )

    def __repr__(self) -> str:
        return (
            f"CompressedStats(K={self.n_categories}, M={self._width}, "
            f"N={self.n_rows}, N_effective={self.n_effective})"
        )

    def to_text(self) -> str:
        """Serialize to the versioned plain-text stats format."""
        lines = [
            f"{STATS_MAGIC} {STATS_FORMAT_VERSION}",
            f"{self.n_categories} {self._width} {self.n_rows} {self.n_effective}",
        ]
        lines.extend(" ".join(str(int(x)) for x in row) for row in self.U)
        lines.append(" ".join(str(int(x)) for x in self.v))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CompressedStats":
        """Parse the stats format written by to_text."""
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise StatsFormatError("Empty stats file", line_number=1)
        magic = lines[0].split()
        if len(magic) != 2 or magic[0] != STATS_MAGIC:
            raise StatsFormatError(f"Expected '{STATS_MAGIC} <version>' header", line_number=1)
        if magic[1] != str(STATS_FORMAT_VERSION):
            raise StatsFormatError(
                f"Unsupported stats format version {magic[1]}",
                line_number=1,
                details={"supported": STATS_FORMAT_VERSION},
            )
        if len(lines) < 2:
            raise StatsFormatError("Missing 'K M N N_effective' header", line_number=2)
        try:
            k, m, n, n_eff = (int(tok) for tok in lines[1].split())
        except ValueError as e:
            raise StatsFormatError("Header must be four integers 'K M N N_effective'", line_number=2) from e
        if k < 1 or m < 0 or n < 0 or n_eff < 0:
            raise StatsFormatError("Header values out of range", line_number=2)
        if len(lines) != 2 + k + 1:
            raise StatsFormatError(
                f"Expected {k + 1} tally lines after the header, found {len(lines) - 2}",
                line_number=len(lines),
            )

        def parse_tallies(idx: int) -> List[int]:
            try:
                values = [int(tok) for tok in lines[idx].split()]
            except ValueError as e:
                raise StatsFormatError("Tallies must be integers", line_number=idx + 1) from e
            if len(values) != m:
                raise StatsFormatError(f"Expected {m} tallies, found {len(values)}", line_number=idx + 1)
            return values

        u = np.array([parse_tallies(2 + i) for i in range(k)], dtype=np.int64).reshape(k, m)
        v = np.array(parse_tallies(2 + k), dtype=np.int64)
        stats = cls(k, u, v, n, n_eff)
        stats.check_invariants()
        return stats


def _survival(values: np.ndarray, width: int) -> np.ndarray:
    """result[m] = number of entries of values greater than m, m < width."""
    if width == 0:
        return np.zeros(0, dtype=np.int64)
    hist = np.bincount(values, minlength=width + 1)
    return (values.shape[0] - np.cumsum(hist[:width])).astype(np.int64)


def _check_mass(counts: np.ndarray) -> None:
    if counts.size == 0:
        return
    k = counts.shape[1]
    if float(counts.max()) * k > _INT64_MAX or float(counts.sum(dtype=np.float64)) > _INT64_MAX:
        raise TallyOverflowError("Total count mass would overflow int64 tallies")


def build_compressed(data: Union[CountMatrix, np.ndarray, Sequence[Sequence[int]]]) -> CompressedStats:
    """Compress a count dataset into (U, v) in a single pass.

    Each column's survival histogram gives a row of U and the row totals'
    survival histogram gives v. All-zero rows are counted in N only.
    """
    counts = data.counts if isinstance(data, CountMatrix) else validate_counts(data)
    _check_mass(counts)
    n_rows, n_categories = counts.shape
    totals = counts.sum(axis=1)
    width = int(totals.max()) if n_rows else 0

    u = np.empty((n_categories, width), dtype=np.int64)
    for k in range(n_categories):
        u[k] = _survival(counts[:, k], width)
    v = _survival(totals, width)
    n_effective = int(np.count_nonzero(totals))

    logger.debug("Compressed %d rows (K=%d) into width M=%d", n_rows, n_categories, width)
    return CompressedStats(n_categories, u, v, n_rows, n_effective)


def add_row(stats: CompressedStats, row: Any) -> CompressedStats:
    """Functional spelling of CompressedStats.add_row (mutates and returns stats)."""
    return stats.add_row(row)


def merge(a: CompressedStats, b: CompressedStats) -> CompressedStats:
    """Combine stats of two disjoint row sets into a new instance."""
    if a.n_categories != b.n_categories:
        raise DimensionMismatchError(
            "Cannot merge stats with different category counts",
            expected=a.n_categories,
            actual=b.n_categories,
        )
    if a.n_rows + b.n_rows > _INT64_MAX:
        raise TallyOverflowError("Merged row count would overflow int64")
    width = max(a.max_total, b.max_total)
    u = np.zeros((a.n_categories, width), dtype=np.int64)
    v = np.zeros(width, dtype=np.int64)
    for part in (a, b):
        u[:, : part.max_total] += part.U
        v[: part.max_total] += part.v
    return CompressedStats(a.n_categories, u, v, a.n_rows + b.n_rows, a.n_effective + b.n_effective)


def merge_all(parts: Iterable[CompressedStats], n_categories: Optional[int] = None) -> CompressedStats:
    """Merge any number of stats with a pairwise tree."""
    level = list(parts)
    if not level:
        if n_categories is None:
            raise ValidationError("merge_all needs at least one input or n_categories")
        return CompressedStats.empty(n_categories)
    while len(level) > 1:
        paired = [merge(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            paired.append(level[-1])
        level = paired
    return level[0]


def build_compressed_sharded(
    data: Union[CountMatrix, np.ndarray],
    shards: int = 1,
    workers: int = 1,
) -> CompressedStats:
    """Compress row shards concurrently and merge them.

    The result equals build_compressed(data) for any shard or worker count.
    """
    counts = data.counts if isinstance(data, CountMatrix) else validate_counts(data)
    if shards < 1 or workers < 1:
        raise ValidationError("shards and workers must be positive", {"shards": shards, "workers": workers})
    if shards == 1 or counts.shape[0] <= 1:
        return build_compressed(counts)

    pieces = np.array_split(counts, min(shards, counts.shape[0]))
    if workers == 1:
        parts = [build_compressed(p) for p in pieces]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(build_compressed, pieces))
    logger.debug("Merged %d shards with %d workers", len(parts), workers)
    return merge_all(parts)
