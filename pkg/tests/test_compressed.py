"""Tests for compressed (U, v) statistics."""

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from src.core.compressed import (
    CompressedStats,
    add_row,
    build_compressed,
    build_compressed_sharded,
    merge,
    merge_all,
)
from src.core.exceptions import (
    DimensionMismatchError,
    StatsFormatError,
    TallyOverflowError,
    ValidationError,
)
from src.core.models import CountMatrix


def count_matrices(max_rows: int = 20, max_k: int = 5, max_count: int = 12):
    return st.integers(min_value=1, max_value=max_k).flatmap(
        lambda k: st.lists(
            st.lists(st.integers(min_value=0, max_value=max_count), min_size=k, max_size=k),
            min_size=1,
            max_size=max_rows,
        )
    )


class TestBuildCompressed:
    def test_worked_example(self, table_counts):
        stats = build_compressed(table_counts)
        assert stats.max_total == 4
        np.testing.assert_array_equal(stats.U, [[1, 1, 1, 0], [2, 1, 0, 0]])
        np.testing.assert_array_equal(stats.v, [2, 2, 1, 1])
        assert stats.n_rows == 2
        assert stats.n_effective == 2

    def test_accepts_plain_lists(self):
        assert build_compressed([[3, 1], [0, 2]]) == build_compressed(CountMatrix(np.array([[3, 1], [0, 2]])))

    def test_all_zero_dataset(self):
        stats = build_compressed(np.zeros((3, 4), dtype=int))
        assert stats.max_total == 0
        assert stats.U.shape == (4, 0)
        assert stats.n_rows == 3
        assert stats.n_effective == 0

    def test_zero_rows_only_bump_row_count(self, table_counts):
        padded = np.vstack([table_counts.counts, np.zeros((5, 2), dtype=int)])
        a, b = build_compressed(table_counts), build_compressed(padded)
        np.testing.assert_array_equal(a.U, b.U)
        np.testing.assert_array_equal(a.v, b.v)
        assert b.n_rows == a.n_rows + 5
        assert b.n_effective == a.n_effective

    @given(rows=count_matrices())
    def test_tallies_recover_column_and_grand_totals(self, rows):
        counts = np.array(rows)
        stats = build_compressed(counts)
        np.testing.assert_array_equal(stats.column_totals(), counts.sum(axis=0))
        assert stats.total_count == counts.sum()
        stats.check_invariants()

    @given(rows=count_matrices())
    def test_row_order_is_irrelevant(self, rows):
        counts = np.array(rows)
        assert build_compressed(counts) == build_compressed(counts[::-1])

    def test_count_histogram(self):
        stats = build_compressed([[2, 0], [2, 1], [0, 3], [1, 0]])
        np.testing.assert_array_equal(stats.count_histogram(0), [0, 1, 2, 0])
        np.testing.assert_array_equal(stats.count_histogram(1), [0, 1, 0, 1])

    def test_views_are_read_only(self, table_counts):
        stats = build_compressed(table_counts)
        with pytest.raises(ValueError):
            stats.U[0, 0] = 7
        with pytest.raises(ValueError):
            stats.v[0] = 7

    def test_rejects_negative_counts(self):
        with pytest.raises(ValidationError):
            build_compressed([[1, -1]])

    def test_mass_overflow(self):
        huge = np.array([[2 ** 62, 2 ** 62]], dtype=np.int64)
        with pytest.raises(TallyOverflowError):
            build_compressed(huge)


class TestAddRow:
    @given(rows=count_matrices())
    def test_incremental_equals_batch(self, rows):
        stats = CompressedStats.empty(len(rows[0]))
        for row in rows:
            add_row(stats, row)
        assert stats == build_compressed(np.array(rows))

    def test_widens_past_initial_capacity(self):
        stats = CompressedStats.empty(2)
        stats.add_row([1, 1]).add_row([30, 70])
        assert stats.max_total == 100
        assert stats.v[99] == 1
        assert stats.U[1, 69] == 1
        assert stats.U[1, 70] == 0

    def test_zero_row(self):
        stats = CompressedStats.empty(3).add_row([0, 0, 0])
        assert (stats.n_rows, stats.n_effective, stats.max_total) == (1, 0, 0)

    def test_wrong_length(self):
        with pytest.raises(DimensionMismatchError):
            CompressedStats.empty(3).add_row([1, 2])


class TestMerge:
    @given(a=count_matrices(max_k=3), b=count_matrices(max_k=3))
    def test_merge_equals_concatenation(self, a, b):
        k = min(len(a[0]), len(b[0]))
        left = np.array(a)[:, :k]
        right = np.array(b)[:, :k]
        merged = merge(build_compressed(left), build_compressed(right))
        assert merged == build_compressed(np.vstack([left, right]))

    def test_merge_is_commutative_and_associative(self, rng):
        parts = [build_compressed(rng.integers(0, 9, size=(rng.integers(1, 8), 3))) for _ in range(3)]
        a, b, c = parts
        assert merge(a, b) == merge(b, a)
        assert merge(merge(a, b), c) == merge(a, merge(b, c))

    def test_merge_leaves_inputs_untouched(self, table_counts):
        a = build_compressed(table_counts)
        before = a.copy()
        merge(a, build_compressed([[9, 9]]))
        assert a == before

    def test_merge_rejects_different_k(self):
        with pytest.raises(DimensionMismatchError):
            merge(CompressedStats.empty(2), CompressedStats.empty(3))

    def test_merge_all(self, rng):
        counts = rng.integers(0, 6, size=(23, 4))
        parts = [build_compressed(chunk) for chunk in np.array_split(counts, 7)]
        assert merge_all(parts) == build_compressed(counts)

    def test_merge_all_empty_needs_k(self):
        assert merge_all([], n_categories=3) == CompressedStats.empty(3)
        with pytest.raises(ValidationError):
            merge_all([])


class TestSharded:
    @pytest.mark.parametrize("shards,workers", [(1, 1), (2, 1), (5, 3), (64, 4)])
    def test_matches_single_pass(self, rng, shards, workers):
        counts = rng.integers(0, 7, size=(101, 3))
        assert build_compressed_sharded(counts, shards, workers) == build_compressed(counts)

    def test_more_shards_than_rows(self):
        counts = np.array([[1, 2], [3, 0]])
        assert build_compressed_sharded(counts, shards=10, workers=2) == build_compressed(counts)

    def test_rejects_non_positive_settings(self):
        with pytest.raises(ValidationError):
            build_compressed_sharded(np.ones((2, 2), dtype=int), shards=0)


class TestTextFormat:
    def test_layout(self, table_counts):
        text = build_compressed(table_counts).to_text()
        assert text == "fastdm-stats 1\n2 4 2 2\n1 1 1 0\n2 1 0 0\n2 2 1 1\n"

    def test_round_trip_preserves_everything(self, rng):
        counts = np.vstack([rng.integers(0, 9, size=(30, 4)), np.zeros((2, 4), dtype=int)])
        stats = build_compressed(counts)
        assert CompressedStats.from_text(stats.to_text()) == stats

    def test_empty_width_round_trip(self):
        stats = build_compressed(np.zeros((2, 3), dtype=int))
        assert CompressedStats.from_text(stats.to_text()) == stats

    def test_rejects_other_version(self, table_counts):
        text = build_compressed(table_counts).to_text().replace("fastdm-stats 1", "fastdm-stats 2")
        with pytest.raises(StatsFormatError, match="line 1"):
            CompressedStats.from_text(text)

    def test_rejects_short_tally_line(self):
        with pytest.raises(StatsFormatError, match="line 3"):
            CompressedStats.from_text("fastdm-stats 1\n2 4 2 2\n1 1 1\n2 1 0 0\n2 2 1 1\n")

    def test_rejects_missing_lines(self):
        with pytest.raises(StatsFormatError):
            CompressedStats.from_text("fastdm-stats 1\n2 4 2 2\n1 1 1 0\n")

    def test_rejects_inconsistent_tallies(self):
        # u[0, 0] exceeds v[0]
        with pytest.raises(StatsFormatError, match="must not exceed"):
            CompressedStats.from_text("fastdm-stats 1\n2 2 1 1\n2 0\n1 1\n1 1\n")
