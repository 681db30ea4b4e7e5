"""Tests for the vectorized special functions."""

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings
from scipy import special as sp

from src.core.exceptions import DomainError
from src.core.special import DUAL_SUM_THRESHOLD, digamma, dual_log_gamma, ln_gamma, trigamma

positive = st.floats(min_value=1e-6, max_value=1e6, allow_nan=False, allow_infinity=False)


class TestAgainstScipy:
    @given(x=positive)
    def test_ln_gamma(self, x):
        assert ln_gamma(x) == pytest.approx(sp.gammaln(x), rel=1e-12)

    @pytest.mark.parametrize("x", [1 + 1e-8, 1 - 1e-9, 1.05, 0.95, 1.0999, 2 - 1e-7, 2 + 1e-6, 2.09, 1.91, 1.3])
    def test_ln_gamma_next_to_its_zeros(self, x):
        assert ln_gamma(x) == pytest.approx(sp.gammaln(x), rel=1e-12)

    @given(x=positive)
    def test_digamma(self, x):
        assert digamma(x) == pytest.approx(sp.digamma(x), rel=1e-12, abs=1e-12)

    @given(x=positive)
    def test_trigamma(self, x):
        assert trigamma(x) == pytest.approx(sp.polygamma(1, x), rel=1e-12, abs=1e-12)

    def test_vectorized_matches_elementwise(self):
        x = np.array([1e-4, 0.3, 1.0, 2.5, 9.99, 10.0, 17.0, 1e5])
        np.testing.assert_allclose(ln_gamma(x), [ln_gamma(float(v)) for v in x], rtol=1e-13, atol=1e-14)
        np.testing.assert_allclose(digamma(x), sp.digamma(x), rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(trigamma(x), sp.polygamma(1, x), rtol=1e-12)


class TestKnownValues:
    def test_ln_gamma_integers(self):
        assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-13)
        assert ln_gamma(2.0) == pytest.approx(0.0, abs=1e-13)
        assert ln_gamma(5.0) == pytest.approx(np.log(24.0), rel=1e-14)

    def test_digamma_one_is_minus_euler_gamma(self):
        assert digamma(1.0) == pytest.approx(-np.euler_gamma, rel=1e-14)

    def test_trigamma_one(self):
        assert trigamma(1.0) == pytest.approx(np.pi ** 2 / 6, rel=1e-14)

    def test_scalar_in_scalar_out(self):
        assert isinstance(ln_gamma(3.0), float)
        assert isinstance(digamma(np.float64(3.0)), float)
        assert ln_gamma(np.array([3.0])).shape == (1,)


class TestRecurrences:
    @given(x=st.floats(min_value=1e-3, max_value=1e4))
    def test_digamma_recurrence(self, x):
        assert digamma(x + 1) - digamma(x) == pytest.approx(1.0 / x, rel=1e-10)

    @given(x=st.floats(min_value=1e-3, max_value=1e4))
    def test_ln_gamma_recurrence(self, x):
        assert ln_gamma(x + 1) - ln_gamma(x) == pytest.approx(np.log(x), rel=1e-9, abs=1e-11)


class TestDualLogGamma:
    def test_zero_count_is_exactly_zero(self):
        assert dual_log_gamma(0.37, 0) == 0.0
        np.testing.assert_array_equal(dual_log_gamma(np.array([0.5, 2.0]), np.array([0, 0])), [0.0, 0.0])

    def test_rising_factorial(self):
        assert dual_log_gamma(1.0, 4) == pytest.approx(np.log(24.0), rel=1e-15)
        assert dual_log_gamma(2.5, 3) == pytest.approx(np.log(2.5 * 3.5 * 4.5), rel=1e-15)

    @settings(max_examples=200)
    @given(a=st.floats(min_value=1e-4, max_value=1e3), n=st.integers(min_value=0, max_value=200))
    def test_matches_gamma_difference(self, a, n):
        expected = sp.gammaln(a + n) - sp.gammaln(a)
        assert dual_log_gamma(a, n) == pytest.approx(expected, rel=1e-10, abs=1e-10)

    def test_both_branches_agree_at_threshold(self):
        a = np.array([0.01, 0.7, 3.0, 40.0])
        below = dual_log_gamma(a, DUAL_SUM_THRESHOLD)
        expected = sp.gammaln(a + DUAL_SUM_THRESHOLD) - sp.gammaln(a)
        np.testing.assert_allclose(below, expected, rtol=1e-12)
        above = dual_log_gamma(a, DUAL_SUM_THRESHOLD + 1)
        np.testing.assert_allclose(above, below + np.log(a + DUAL_SUM_THRESHOLD), rtol=1e-12)

    def test_broadcasts_row_against_matrix(self):
        alpha = np.array([0.5, 1.5, 4.0])
        counts = np.array([[0, 2, 50], [3, 0, 1]])
        out = dual_log_gamma(alpha[np.newaxis, :], counts)
        assert out.shape == (2, 3)
        np.testing.assert_allclose(out, sp.gammaln(alpha + counts) - sp.gammaln(alpha), rtol=1e-12, atol=1e-14)


class TestDomain:
    @pytest.mark.parametrize("fn", [ln_gamma, digamma, trigamma])
    @pytest.mark.parametrize("x", [0.0, -1.5, np.inf, np.nan])
    def test_rejects_non_positive_or_non_finite(self, fn, x):
        with pytest.raises(DomainError):
            fn(x)

    def test_dual_log_gamma_rejects_negative_count(self):
        with pytest.raises(DomainError):
            dual_log_gamma(1.0, -1)

    def test_dual_log_gamma_rejects_fractional_count(self):
        with pytest.raises(DomainError):
            dual_log_gamma(1.0, 1.5)
