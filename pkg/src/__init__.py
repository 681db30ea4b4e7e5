"""
FastDM - fast maximum-likelihood estimation for Dirichlet and
Dirichlet-multinomial distributions.

Count data is compressed once into (U, v) tallies; Newton iterations then
cost O(MK) regardless of the number of rows. Usable as:
- CLI tool (`fastdm fit`, `fastdm stats`, `fastdm sample`, `fastdm bench`)
- Python library for embedding in other systems
"""

__version__ = "1.0.0"
__author__ = "FastDM Team"

from .core.compressed import CompressedStats, build_compressed, merge
from .core.config import SolverConfig, SynthSpec
from .core.dirichlet import fit_dirichlet, suff_stat
from .core.dirichlet_multinomial import dm_log_prob, fit_dm
from .core.exceptions import FastDMError
from .core.models import CountMatrix, DirichletParams, ProbabilityMatrix
from .core.sampling import synthesize
from .core.schemas import SolverReport

# Main exports
__all__ = [
    "CompressedStats",
    "CountMatrix",
    "DirichletParams",
    "FastDMError",
    "ProbabilityMatrix",
    "SolverConfig",
    "SolverReport",
    "SynthSpec",
    "build_compressed",
    "dm_log_prob",
    "fit_dirichlet",
    "fit_dm",
    "merge",
    "suff_stat",
    "synthesize",
]
