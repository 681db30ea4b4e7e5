"""Tests for runtime sweeps."""

import csv
import io

import numpy as np

from src.core.bench import CSV_COLUMNS, dataset_for, run_bench, write_csv
from src.core.config import BenchConfig


def small_sweep(**overrides) -> BenchConfig:
    values = dict(sweep="N", start=200, stop=200, repeats=1, tol=1e-8, max_iters=100000)
    values.update(overrides)
    return BenchConfig(**values)


class TestDatasets:
    def test_n_sweep_varies_rows(self):
        data = dataset_for(small_sweep(), 300)
        assert data.counts.shape == (300, 3)
        np.testing.assert_array_equal(data.row_totals, 10)

    def test_m_sweep_varies_row_total(self):
        data = dataset_for(small_sweep(sweep="M", n_rows=50), 40)
        assert data.counts.shape == (50, 3)
        np.testing.assert_array_equal(data.row_totals, 40)

    def test_k_sweep_varies_categories(self):
        data = dataset_for(small_sweep(sweep="K", n_rows=20), 8)
        assert data.counts.shape == (20, 8)
        np.testing.assert_array_equal(data.row_totals, 50)

    def test_custom_alpha(self):
        data = dataset_for(small_sweep(alpha="1,1,1,1", row_total=3), 10)
        assert data.counts.shape == (10, 4)


class TestRunBench:
    def test_one_row_per_method(self):
        rows = list(run_bench(small_sweep()))
        assert [r.method for r in rows] == ["newton-compressed", "fp-compressed", "fp-naive", "newton-naive"]
        for row in rows:
            assert row.value == 200
            assert row.converged
            assert row.total_seconds == row.precompute_seconds + row.solve_seconds

    def test_points_in_order(self):
        rows = list(run_bench(small_sweep(sweep="M", start=5, stop=20, n_rows=300, methods=["newton-compressed"])))
        assert [r.value for r in rows] == [5, 10, 20]

    def test_failed_point_is_recorded(self):
        # the first category never receives a draw, so its estimate sits on the boundary
        rows = list(run_bench(small_sweep(alpha=[1e-9, 50.0], methods=["newton-compressed"])))
        assert len(rows) == 1
        assert not rows[0].converged
        assert rows[0].total_seconds == 0.0


class TestCsv:
    def test_header_and_rows(self):
        out = io.StringIO()
        written = write_csv(run_bench(small_sweep(methods=["newton-compressed", "fp-compressed"])), out)
        assert written == 2
        records = list(csv.DictReader(io.StringIO(out.getvalue())))
        assert tuple(records[0].keys()) == CSV_COLUMNS
        assert records[0]["sweep"] == "N"
        assert records[1]["method"] == "fp-compressed"
        assert records[0]["converged"] == "true"
        assert len(records[0]["solve_seconds"].split(".")[1]) == 6

    def test_empty_stream_still_has_header(self):
        out = io.StringIO()
        assert write_csv(iter([]), out) == 0
        assert out.getvalue() == ",".join(CSV_COLUMNS) + "\n"
