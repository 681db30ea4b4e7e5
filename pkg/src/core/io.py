"""
Plain-text file formats.

Dense datasets hold one row per line with K integers separated by
whitespace and/or commas. Sparse datasets start with a `K <value>` header,
then hold `index:count` pairs per row, with `-` for an all-zero row. In
both, blank lines and `#` comments are skipped. Probability datasets use
the dense layout with real numbers. Compressed stats use the versioned
format of CompressedStats.to_text.
"""

import re
from pathlib import Path
from typing import Dict, Iterable, List, Literal, Optional, Set, TextIO, Tuple, Union

import numpy as np

from .compressed import STATS_MAGIC, CompressedStats
from .exceptions import DatasetParseError, FastDMError, StatsFormatError
from .models import CountMatrix, ProbabilityMatrix
from .schemas import SolverReport

REPORT_MAGIC = "fastdm-report"
REPORT_FORMAT_VERSION = 1
REPORT_KEYS = (
    "format",
    "model",
    "method",
    "converged",
    "iterations",
    "alpha_hat",
    "final_grad_norm",
    "objective",
    "precompute_seconds",
    "solve_seconds",
    "rows",
    "rows_effective",
    "categories",
    "max_total",
)

DatasetFormat = Literal["auto", "dense", "sparse", "stats"]
PathLike = Union[str, Path]

_SEPARATORS = re.compile(r"[,\s]+")


def _content_lines(lines: Iterable[str]) -> Iterable[Tuple[int, str]]:
    """(1-based line number, stripped content) with comments and blanks removed."""
    for number, raw in enumerate(lines, start=1):
        content = raw.split("#", 1)[0].strip()
        if content:
            yield number, content


def _tokens(content: str) -> List[str]:
    return [tok for tok in _SEPARATORS.split(content) if tok]


def parse_dense(lines: Iterable[str], n_categories: Optional[int] = None) -> CountMatrix:
    """Parse dense count rows; every row must have the same length."""
    rows: List[List[int]] = []
    width = n_categories
    for number, content in _content_lines(lines):
        try:
            row = [int(tok) for tok in _tokens(content)]
        except ValueError as e:
            raise DatasetParseError(f"Counts must be integers: {content!r}", line_number=number) from e
        if width is None:
            width = len(row)
        if len(row) != width:
            raise DatasetParseError(f"Expected {width} columns, found {len(row)}", line_number=number)
        if any(c < 0 for c in row):
            raise DatasetParseError("Counts must be non-negative", line_number=number)
        rows.append(row)
    if width is None:
        raise DatasetParseError("Dataset has no rows")
    return CountMatrix.from_rows(rows, n_categories=width)


def parse_sparse(lines: Iterable[str]) -> CountMatrix:
    """Parse the `K <value>` header plus `index:count` rows."""
    n_categories: Optional[int] = None
    rows: List[np.ndarray] = []
    for number, content in _content_lines(lines):
        if n_categories is None:
            parts = content.split()
            if len(parts) != 2 or parts[0] != "K":
                raise DatasetParseError("Sparse dataset must start with 'K <value>'", line_number=number)
            try:
                n_categories = int(parts[1])
            except ValueError as e:
                raise DatasetParseError("K must be an integer", line_number=number) from e
            if n_categories < 1:
                raise DatasetParseError("K must be positive", line_number=number)
            continue
        row = np.zeros(n_categories, dtype=np.int64)
        if content != "-":
            seen: Set[int] = set()
            for tok in _tokens(content):
                index_text, sep, count_text = tok.partition(":")
                try:
                    if not sep:
                        raise ValueError(tok)
                    index, count = int(index_text), int(count_text)
                except ValueError as e:
                    raise DatasetParseError(f"Expected 'index:count', found {tok!r}", line_number=number) from e
                if not 0 <= index < n_categories:
                    raise DatasetParseError(f"Index {index} outside [0, {n_categories})", line_number=number)
                if count < 0:
                    raise DatasetParseError("Counts must be non-negative", line_number=number)
                if index in seen:
                    raise DatasetParseError(f"Index {index} repeated", line_number=number)
                seen.add(index)
                row[index] = count
        rows.append(row)
    if n_categories is None:
        raise DatasetParseError("Sparse dataset is missing its 'K <value>' header")
    if not rows:
        return CountMatrix(np.zeros((0, n_categories), dtype=np.int64))
    return CountMatrix(np.vstack(rows))


def parse_probabilities(lines: Iterable[str]) -> ProbabilityMatrix:
    """Parse dense rows of probability vectors."""
    rows: List[List[float]] = []
    for number, content in _content_lines(lines):
        try:
            row = [float(tok) for tok in _tokens(content)]
        except ValueError as e:
            raise DatasetParseError(f"Probabilities must be numbers: {content!r}", line_number=number) from e
        if rows and len(row) != len(rows[0]):
            raise DatasetParseError(f"Expected {len(rows[0])} columns, found {len(row)}", line_number=number)
        rows.append(row)
    if not rows:
        raise DatasetParseError("Dataset has no rows")
    try:
        return ProbabilityMatrix(np.asarray(rows, dtype=np.float64))
    except FastDMError as e:
        raise DatasetParseError(e.message, details=e.details) from e


def detect_format(text: str) -> str:
    """Guess dense, sparse or stats from the first content line."""
    for _, content in _content_lines(text.splitlines()):
        if content.startswith(STATS_MAGIC):
            return "stats"
        if content.split()[0] == "K":
            return "sparse"
        return "dense"
    return "dense"


def load_counts(path: PathLike, fmt: DatasetFormat = "auto") -> Union[CountMatrix, CompressedStats]:
    """Read a count dataset or stats file from disk."""
    text = Path(path).read_text()
    kind = detect_format(text) if fmt == "auto" else fmt
    if kind == "stats":
        return _stats_from_text(text)
    if kind == "sparse":
        return parse_sparse(text.splitlines())
    return parse_dense(text.splitlines())


def load_probabilities(path: PathLike) -> ProbabilityMatrix:
    return parse_probabilities(Path(path).read_text().splitlines())


def _stats_from_text(text: str) -> CompressedStats:
    if not text.lstrip().startswith(STATS_MAGIC):
        raise StatsFormatError(f"Not a {STATS_MAGIC} file", line_number=1)
    return CompressedStats.from_text(text)


def read_stats(path: PathLike) -> CompressedStats:
    """Read a stats file, rejecting anything without the stats header."""
    return _stats_from_text(Path(path).read_text())


def write_stats(stats: CompressedStats, stream: TextIO) -> None:
    stream.write(stats.to_text())


def write_dense(data: CountMatrix, stream: TextIO) -> None:
    for row in data.counts:
        stream.write(" ".join(str(int(c)) for c in row) + "\n")


def write_sparse(data: CountMatrix, stream: TextIO) -> None:
    stream.write(f"K {data.n_categories}\n")
    for row in data.counts:
        nz = np.flatnonzero(row)
        stream.write(" ".join(f"{i}:{int(row[i])}" for i in nz) + "\n" if nz.size else "-\n")


def format_report(
    report: SolverReport,
    model: str,
    rows: int,
    rows_effective: int,
    categories: int,
    max_total: int,
) -> str:
    """Render a fit as `key: value` lines in REPORT_KEYS order."""
    values: Dict[str, str] = {
        "format": f"{REPORT_MAGIC} {REPORT_FORMAT_VERSION}",
        "model": model,
        "method": report.method,
        "converged": "true" if report.converged else "false",
        "iterations": str(report.iterations),
        "alpha_hat": ",".join(repr(float(a)) for a in report.alpha_hat),
        "final_grad_norm": repr(float(report.final_grad_norm)),
        "objective": repr(float(report.objective)),
        "precompute_seconds": f"{report.timings.precompute_seconds:.6f}",
        "solve_seconds": f"{report.timings.solve_seconds:.6f}",
        "rows": str(rows),
        "rows_effective": str(rows_effective),
        "categories": str(categories),
        "max_total": str(max_total),
    }
    return "".join(f"{key}: {values[key]}\n" for key in REPORT_KEYS)


def parse_report(text: str) -> Dict[str, str]:
    """Inverse of format_report, as a key -> raw value mapping."""
    out: Dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        key, sep, value = line.partition(": ")
        if not sep:
            raise DatasetParseError(f"Expected 'key: value', found {line!r}", line_number=number)
        out[key] = value
    return out
