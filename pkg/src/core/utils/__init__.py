"""Utility modules for FastDM."""

from .logging import get_logger, setup_logging
from .validation import validate_alpha, validate_count_row, validate_counts, validate_probabilities

__all__ = [
    "get_logger",
    "setup_logging",
    "validate_alpha",
    "validate_count_row",
    "validate_counts",
    "validate_probabilities",
]
