import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal, assert_equal
from scipy import special

from src.core.errors import DegenerateTargetError, DomainError
from src.core.streams import PURPOSES, stream
from src.services.statistics import (
    bootstrap_median_ci,
    ks_distance,
    loglog_slope,
    normal_cdf,
    scaled_chi2_cdf,
    sign_agreement,
    sign_test,
)


class TestScaledChi2(object):

    def test_positive_coefficient(self):
        cdf = scaled_chi2_cdf(2.0)
        assert_allclose(cdf(2.0), 2.0 * special.ndtr(1.0) - 1.0, rtol=1e-14)
        assert_equal(cdf(-1.0), 0.0)

    def test_negative_coefficient(self):
        cdf = scaled_chi2_cdf(-2.0)
        assert_allclose(cdf(-2.0), 2.0 - 2.0 * special.ndtr(1.0), rtol=1e-14)
        assert_equal(cdf(0.5), 1.0)

    def test_degenerate(self):
        with pytest.raises(DegenerateTargetError):
            scaled_chi2_cdf(0.0)

    def test_ks_against_simulated_law(self):
        z = stream(9).standard_normal(20_000)
        assert ks_distance(0.18 * z * z, scaled_chi2_cdf(0.18)) < 0.02
        assert ks_distance(z, normal_cdf) < 0.02
        with pytest.raises(DomainError):
            ks_distance([], normal_cdf)

    def test_ks_matches_pairwise_count(self):
        x = stream(10).standard_normal(100)
        x[:5] = x[5]  # ties
        n = len(x)
        brute = 0.0
        for xi in x:
            below = sum(1 for xj in x if xj < xi) / n
            at_or_below = sum(1 for xj in x if xj <= xi) / n
            f = float(normal_cdf(xi))
            brute = max(brute, abs(at_or_below - f), abs(f - below))
        assert_allclose(ks_distance(x, normal_cdf), brute, rtol=1e-12)


class TestSlopes(object):

    def test_exact_power(self):
        ns = [2 ** k for k in range(8, 13)]
        values = np.tile(np.asarray(ns, dtype=float) ** -0.5, (60, 1))
        fit = loglog_slope(ns, values, bootstrap=50)
        assert_allclose(fit.slope, -0.5, atol=1e-12)
        assert fit.se < 1e-10

    def test_shape_checks(self):
        with pytest.raises(DomainError):
            loglog_slope([100, 200], np.ones((5, 3)))
        with pytest.raises(DomainError):
            loglog_slope([100], np.ones((5, 1)))
        with pytest.raises(DomainError):
            loglog_slope([100, 200], np.zeros((5, 2)))

    def test_median_interval(self):
        values = stream(1).standard_normal(400)
        lo, hi = bootstrap_median_ci(values, bootstrap=200)
        assert lo <= np.median(values) <= hi


class TestSigns(object):

    def test_sign_test(self):
        assert_allclose(sign_test(np.ones(10)), 2.0 * 0.5 ** 10, rtol=1e-12)
        assert_equal(sign_test(np.zeros(4)), 1.0)

    def test_sign_agreement(self):
        assert_equal(sign_agreement([1.0, 2.0, -1.0, 0.0], 0.3), 0.5)
        assert_equal(sign_agreement([-1.0, -2.0], -0.3), 1.0)


class TestStreams(object):

    def test_deterministic(self):
        assert_array_equal(stream(4, 2, "path").random(5), stream(4, 2, "path").random(5))

    def test_purposes_are_independent(self):
        draws = {p: stream(4, 2, p).random(3) for p in PURPOSES}
        assert len({tuple(v) for v in draws.values()}) == len(PURPOSES)

    def test_invalid(self):
        with pytest.raises(KeyError):
            stream(1, 0, "unknown")
        with pytest.raises(ValueError):
            stream(-1)
