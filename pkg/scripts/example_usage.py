#!/usr/bin/env python3
"""
Example usage of FastDM.

This script walks through sampling, compressing, merging and fitting.
"""

import numpy as np
from dotenv import load_dotenv

from src import SolverConfig, SynthSpec, build_compressed, fit_dirichlet, fit_dm, merge, suff_stat, synthesize
from src.core.models import ProbabilityMatrix
from src.core.sampling import make_rng, sample_dirichlet_rows
from src.core.services import OnlineEstimator
from src.core.utils.logging import setup_logging

# Load environment variables
load_dotenv()


def main() -> None:
    """Main example function."""
    setup_logging("WARNING")
    print("🚀 FastDM Example")
    print("=" * 50)

    true_alpha = [3.0, 1.0, 2.0]
    data = synthesize(SynthSpec(alpha=true_alpha, n_rows=20000, row_total=10, seed=1))
    print(f"Sampled {data.n_rows} rows of {data.n_categories} categories from alpha={true_alpha}")

    # Example 1: compress once, then fit
    print("\n📦 Example 1: Compressed Newton")
    print("-" * 30)
    stats = build_compressed(data)
    print(f"Stats: {stats!r}")
    report = fit_dm(stats)
    print(f"alpha_hat = {np.round(report.alpha, 4).tolist()} in {report.iterations} iterations")
    print(f"precompute {report.timings.precompute_seconds:.4f}s, solve {report.timings.solve_seconds:.4f}s")

    # Example 2: the same estimate from every method
    print("\n🔁 Example 2: Method comparison")
    print("-" * 30)
    for method in ("newton-compressed", "fp-compressed", "fp-naive", "newton-naive"):
        r = fit_dm(data, SolverConfig(method=method, tol=1e-6, max_iters=100000))
        print(f"{method:18s} iterations={r.iterations:6d} total={r.timings.total_seconds:.4f}s")

    # Example 3: shards compressed separately and merged
    print("\n🧵 Example 3: Merging shards")
    print("-" * 30)
    halves = np.array_split(data.counts, 2)
    merged = merge(build_compressed(halves[0]), build_compressed(halves[1]))
    print(f"Merged stats equal single-pass stats: {merged == stats}")

    # Example 4: online refits
    print("\n📈 Example 4: Online estimation")
    print("-" * 30)
    estimator = OnlineEstimator(data.n_categories, refit_every=5000)
    for snapshot in estimator.ingest(data.counts):
        print(snapshot.render(), end="")

    # Example 5: pure Dirichlet
    print("\n📐 Example 5: Pure Dirichlet")
    print("-" * 30)
    probs = ProbabilityMatrix(sample_dirichlet_rows(true_alpha, 5000, make_rng(2)))
    dirichlet_report = fit_dirichlet(suff_stat(probs))
    print(f"alpha_hat = {np.round(dirichlet_report.alpha, 4).tolist()}")

    print("\n✅ Example completed!")


if __name__ == "__main__":
    main()
