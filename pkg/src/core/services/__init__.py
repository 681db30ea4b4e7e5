"""Service layer for FastDM."""

from .fit_service import FitOutcome, FitService
from .online_service import OnlineEstimator, Snapshot

__all__ = ["FitOutcome", "FitService", "OnlineEstimator", "Snapshot"]
