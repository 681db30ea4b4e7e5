"""
Special functions for Dirichlet likelihoods.

ln-gamma, digamma and trigamma are evaluated by shifting the argument upward
with the recurrence until it reaches SHIFT_THRESHOLD and then summing the
asymptotic series. Next to its zeros at 1 and 2, ln-gamma switches to the Taylor
series about 1. All functions accept a scalar or a numpy array and return
the same shape (a plain float for scalar input).
"""

import math
from typing import Any, Union

import numpy as np

from .exceptions import DomainError

ArrayLike = Union[float, int, np.ndarray]

SHIFT_THRESHOLD = 10.0
DUAL_SUM_THRESHOLD = 32

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

_EULER_GAMMA = 0.5772156649015329

# zeta(k) for k = 2..16, the Taylor coefficients of ln_gamma about 1 up to sign and 1/k
_ZETA = (
    1.6449340668482264,
    1.2020569031595943,
    1.0823232337111382,
    1.0369277551433699,
    1.0173430619844491,
    1.0083492773819228,
    1.0040773561979443,
    1.0020083928260822,
    1.0009945751278181,
    1.0004941886041195,
    1.0002460865533080,
    1.0001227133475785,
    1.0000612481350587,
    1.0000305882363070,
    1.0000152822594087,
)
_LGAMMA_NEAR_ONE = tuple((-1) ** k * z / k for k, z in enumerate(_ZETA, start=2))

# half-width of the windows around 1 and 2 where the Taylor series replaces the shift
ROOT_WINDOW = 0.1

# Stirling coefficients B_{2j} / (2j (2j-1)) for 1/x^(2j-1), j = 1..7
_LGAMMA_SERIES = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)

# B_{2j} / (2j) for 1/x^(2j), j = 1..7
_DIGAMMA_SERIES = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

# B_{2j} for 1/x^(2j+1), j = 1..7
_TRIGAMMA_SERIES = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)


def _as_positive(x: Any, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} requires finite positive arguments")
    return arr


def _result(arr: np.ndarray, scalar: bool) -> ArrayLike:
    return float(arr) if scalar else arr


def _shift_count(x: np.ndarray) -> int:
    return max(0, math.ceil(SHIFT_THRESHOLD - float(x.min())))


def _lgamma_asymptotic(x: np.ndarray) -> np.ndarray:
    inv = 1.0 / x
    inv2 = inv * inv
    series = np.zeros_like(x)
    for coef in reversed(_LGAMMA_SERIES):
        series = series * inv2 + coef
    return (x - 0.5) * np.log(x) - x + _HALF_LOG_2PI + series * inv


def _lgamma_near_one(eps: np.ndarray) -> np.ndarray:
    """ln_gamma(1 + eps) = -gamma eps + sum_k (-1)^k zeta(k) eps^k / k for small |eps|."""
    series = np.zeros_like(eps)
    for coef in reversed(_LGAMMA_NEAR_ONE):
        series = series * eps + coef
    return eps * (series * eps - _EULER_GAMMA)


def _digamma_asymptotic(x: np.ndarray) -> np.ndarray:
    inv2 = 1.0 / (x * x)
    series = np.zeros_like(x)
    for coef in reversed(_DIGAMMA_SERIES):
        series = series * inv2 + coef
    return np.log(x) - 0.5 / x - series * inv2


def _trigamma_asymptotic(x: np.ndarray) -> np.ndarray:
    inv = 1.0 / x
    inv2 = inv * inv
    series = np.zeros_like(x)
    for coef in reversed(_TRIGAMMA_SERIES):
        series = series * inv2 + coef
    return inv + 0.5 * inv2 + series * inv2 * inv


def ln_gamma(x: ArrayLike) -> ArrayLike:
    """Natural log of the gamma function for x > 0."""
    arr = _as_positive(x, "ln_gamma")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)

    small = arr < SHIFT_THRESHOLD
    large = ~small
    if np.any(large):
        out[large] = _lgamma_asymptotic(arr[large])
    if np.any(small):
        xs = arr[small]
        # xs + shift stays below 2 * SHIFT_THRESHOLD, so the product cannot overflow
        shift = _shift_count(xs)
        product = np.ones_like(xs)
        for i in range(shift):
            product *= xs + i
        out[small] = _lgamma_asymptotic(xs + shift) - np.log(product)
    # the shifted form loses the leading digits next to the zeros at 1 and 2
    near_one = np.abs(arr - 1.0) < ROOT_WINDOW
    near_two = np.abs(arr - 2.0) < ROOT_WINDOW
    if np.any(near_one):
        out[near_one] = _lgamma_near_one(arr[near_one] - 1.0)
    if np.any(near_two):
        eps = arr[near_two] - 2.0
        out[near_two] = _lgamma_near_one(eps) + np.log1p(eps)
    return _result(out.reshape(()) if scalar else out, scalar)


def digamma(x: ArrayLike) -> ArrayLike:
    """Psi(x), the derivative of ln_gamma."""
    arr = _as_positive(x, "digamma")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)

    small = arr < SHIFT_THRESHOLD
    large = ~small
    if np.any(large):
        out[large] = _digamma_asymptotic(arr[large])
    if np.any(small):
        xs = arr[small]
        shift = _shift_count(xs)
        acc = np.zeros_like(xs)
        for i in range(shift):
            acc += 1.0 / (xs + i)
        out[small] = _digamma_asymptotic(xs + shift) - acc
    return _result(out.reshape(()) if scalar else out, scalar)


def trigamma(x: ArrayLike) -> ArrayLike:
    """Psi'(x), the derivative of digamma."""
    arr = _as_positive(x, "trigamma")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)

    small = arr < SHIFT_THRESHOLD
    large = ~small
    if np.any(large):
        out[large] = _trigamma_asymptotic(arr[large])
    if np.any(small):
        xs = arr[small]
        shift = _shift_count(xs)
        acc = np.zeros_like(xs)
        for i in range(shift):
            shifted = xs + i
            acc += 1.0 / (shifted * shifted)
        out[small] = _trigamma_asymptotic(xs + shift) + acc
    return _result(out.reshape(()) if scalar else out, scalar)


def dual_log_gamma(a: ArrayLike, n: ArrayLike) -> ArrayLike:
    """ln(a (a+1) ... (a+n-1)) = ln_gamma(a+n) - ln_gamma(a).

    Counts up to DUAL_SUM_THRESHOLD are summed term by term; larger counts use
    the ln_gamma difference. Broadcasts over arrays; n = 0 gives exactly 0.
    """
    a_arr = _as_positive(a, "dual_log_gamma")
    n_arr = np.asarray(n)
    if n_arr.dtype.kind == "f":
        if not np.all(np.isfinite(n_arr)) or np.any(n_arr != np.round(n_arr)):
            raise DomainError("dual_log_gamma requires integer counts")
    if np.any(n_arr < 0):
        raise DomainError("dual_log_gamma requires non-negative counts")
    n_arr = n_arr.astype(np.int64)
    scalar = a_arr.ndim == 0 and n_arr.ndim == 0
    a_b, n_b = np.broadcast_arrays(np.atleast_1d(a_arr), np.atleast_1d(n_arr))

    out = np.zeros(a_b.shape, dtype=np.float64)
    direct = (n_b > 0) & (n_b <= DUAL_SUM_THRESHOLD)
    if np.any(direct):
        ad = a_b[direct]
        nd = n_b[direct]
        acc = np.zeros_like(ad)
        for i in range(int(nd.max())):
            acc += np.where(i < nd, np.log(ad + i), 0.0)
        out[direct] = acc
    bulk = n_b > DUAL_SUM_THRESHOLD
    if np.any(bulk):
        ab = a_b[bulk]
        out[bulk] = ln_gamma(ab + n_b[bulk]) - ln_gamma(ab)
    return _result(out.reshape(()) if scalar else out, scalar)
