"""Core components for FastDM."""

from .compressed import CompressedStats, build_compressed, build_compressed_sharded, merge, merge_all
from .config import BenchConfig, SolverConfig, SynthSpec, get_config
from .dirichlet import fit_dirichlet, suff_stat
from .dirichlet_multinomial import fit_dm
from .newton import StructuredHessian, solve_structured

__all__ = [
    "BenchConfig",
    "CompressedStats",
    "SolverConfig",
    "StructuredHessian",
    "SynthSpec",
    "build_compressed",
    "build_compressed_sharded",
    "fit_dirichlet",
    "fit_dm",
    "get_config",
    "merge",
    "merge_all",
    "solve_structured",
    "suff_stat",
]
