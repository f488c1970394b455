"""Shared oracles and fixtures.

Oracles here re-derive expected values by routes independent of the
library code: exact rational arithmetic for moment statistics, direct
order-statistics interpolation for quantiles, and plain-python model
evaluation for the saturating curve.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from respstats import ResponseMatrix


def kurtosis_fraction(values) -> Fraction:
    """Exact excess kurtosis of integer/rational samples via Fractions."""
    vals = [Fraction(v) for v in values]
    n = len(vals)
    mean = sum(vals) / n
    m2 = sum((v - mean) ** 2 for v in vals) / n
    m4 = sum((v - mean) ** 4 for v in vals) / n
    return m4 / (m2 * m2) - 3


def kurtosis_float(values) -> float:
    """Direct float evaluation of the population-moment formula."""
    n = len(values)
    mean = sum(values) / n
    m2 = sum((v - mean) ** 2 for v in values) / n
    m4 = sum((v - mean) ** 4 for v in values) / n
    return m4 / (m2 * m2) - 3.0


def quantile_type7(values, q: float) -> float:
    """Linear interpolation between order statistics."""
    s = sorted(values)
    h = (len(s) - 1) * q
    lo = math.floor(h)
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (h - lo) * (s[hi] - s[lo])


def gpd_inverse_cdf(u, k: float, sigma: float, theta: float):
    """Inverse-CDF sampling route for generalized-Pareto exceedances."""
    u = np.asarray(u, dtype=float)
    if abs(k) < 1e-12:
        return theta - sigma * np.log1p(-u)
    return theta + sigma * ((1.0 - u) ** (-k) - 1.0) / k


def curve_direct(a, b, c, d, e, f, x: float) -> float:
    """Plain-python evaluation of the saturating curve (moderate x only)."""
    t = x**c / d
    return a * (1.0 - (b / (math.exp(t) - 1.0 + b)) ** e) ** f


def planted_matrix(rng, s, n, rank, noise):
    """Known-rank construction with equal-power orthonormal components."""
    qu, _ = np.linalg.qr(rng.standard_normal((s, rank)))
    qv, _ = np.linalg.qr(rng.standard_normal((n, rank)))
    signal = qu @ qv.T
    signal = signal / signal.std()
    if noise:
        signal = signal + noise * rng.standard_normal((s, n))
    return signal


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def small_matrix():
    return ResponseMatrix(np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]))
