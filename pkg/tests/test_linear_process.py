import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal, assert_equal
from scipy import special

from src.core.errors import DomainError, MemoryBudgetError, TruncationError, UnsupportedOrderError
from src.core.streams import stream
from src.schemas.lrd import CoefficientSpec, InnovationSpec, SlowlyVarying
from src.services.linear_process import (
    SecondOrder,
    autocovariance,
    autocovariance_tail,
    autocovariance_untruncated,
    autocovariances,
    make_coefficients,
    partial_sum_track,
    partial_sum_y,
    path_from_innovations,
    sample_path,
    sigma_np,
    tail_truncation_index,
)

GAUSS = InnovationSpec()


class TestCoefficients(object):

    def test_powers(self):
        spec = CoefficientSpec(beta=0.75)
        c = make_coefficients(spec, 4)
        assert_allclose(c[1], 1.0, rtol=1e-15)
        assert_allclose(c[4], 0.353553, rtol=1e-6)

    def test_unit_variance(self):
        spec = CoefficientSpec(beta=0.7, normalize_unit_variance=True)
        for K in (0, 1, 17, 4096):
            c = make_coefficients(spec, K)
            assert_allclose(math.fsum(c * c), 1.0, atol=1e-12)

    def test_regular_variation(self):
        spec = CoefficientSpec(beta=0.65)
        c = make_coefficients(spec, 2 ** 11)
        k = 2 ** 10
        assert_allclose(c[2 * k] / c[k], 2.0 ** -0.65, atol=1e-6)

    def test_log_power_factor(self):
        spec = CoefficientSpec(beta=0.7, slowly_varying=SlowlyVarying(kind="log_power", scale=2.0, a=1.0))
        c = make_coefficients(spec, 10)
        assert_allclose(c[10], 2.0 * 10 ** -0.7 * math.log(10 + math.e), rtol=1e-14)

    def test_negative_index(self):
        with pytest.raises(DomainError):
            make_coefficients(CoefficientSpec(beta=0.7), -1)

    def test_strict_truncation(self):
        spec = CoefficientSpec(beta=0.75, truncation_eps=1e-2, strict_truncation=True)
        required = tail_truncation_index(spec)
        with pytest.raises(TruncationError) as info:
            make_coefficients(spec, required - 1)
        assert str(required) in str(info.value)
        assert make_coefficients(spec, required).shape == (required + 1,)


class TestTruncation(object):

    def test_tail_meets_eps(self):
        beta, eps = 0.75, 1e-4
        K = tail_truncation_index(CoefficientSpec(beta=beta, truncation_eps=eps))
        total = 1.0 + special.zeta(2 * beta, 1)
        # exact tail sum_{k>K} k^(-2beta) from the Hurwitz zeta function
        assert special.zeta(2 * beta, K + 1) <= eps * total
        assert K > 1

    def test_faster_decay_needs_less(self):
        k_fast = tail_truncation_index(CoefficientSpec(beta=0.95, truncation_eps=1e-4))
        k_slow = tail_truncation_index(CoefficientSpec(beta=0.55, truncation_eps=1e-4))
        assert k_fast < k_slow

    def test_no_tail_constraint(self):
        assert_equal(tail_truncation_index(CoefficientSpec(beta=0.7, truncation_eps=1.0)), 0)


class TestPaths(object):

    def test_zero_innovations(self):
        spec = CoefficientSpec(beta=0.7)
        path = path_from_innovations(spec, GAUSS, np.zeros(8 + 2), K=2)
        assert_array_equal(path.x, np.zeros(8))

    def test_direct_convolution(self):
        spec = CoefficientSpec(beta=0.7)
        K, n = 3, 6
        eps = stream(3).standard_normal(n + K)
        path = path_from_innovations(spec, GAUSS, eps, K=K)
        c = path.coefficients
        direct = [sum(c[k] * eps[t + K - k] for k in range(K + 1)) for t in range(n)]
        assert_allclose(path.x, direct, rtol=1e-12, atol=1e-14)

    def test_short_filter(self):
        spec = CoefficientSpec(beta=0.7)
        eps = np.array([2.0, 1.0, -1.0, 0.5, 3.0])
        path = path_from_innovations(spec, GAUSS, eps, K=1)
        assert_allclose(path.x, eps[1:] + eps[:-1], rtol=1e-12)

    def test_deterministic(self):
        spec = CoefficientSpec(beta=0.65, truncation_index=128)
        a = sample_path(spec, GAUSS, 500, seed=11, rep=4)
        b = sample_path(spec, GAUSS, 500, seed=11, rep=4)
        assert_array_equal(a.x, b.x)
        c = sample_path(spec, GAUSS, 500, seed=11, rep=5)
        assert not np.array_equal(a.x, c.x)

    def test_memory_budget(self):
        spec = CoefficientSpec(beta=0.65, truncation_index=100)
        with pytest.raises(MemoryBudgetError):
            sample_path(spec, GAUSS, 1000, seed=1, memory_budget=1000)

    def test_prefix_shares_innovations(self):
        spec = CoefficientSpec(beta=0.65, truncation_index=32)
        path = sample_path(spec, GAUSS, 200, seed=2)
        head = path.prefix(50)
        assert_array_equal(head.x, path.x[:50])
        rebuilt = path_from_innovations(spec, GAUSS, head.innovations, K=32)
        assert_allclose(rebuilt.x, head.x, rtol=1e-12, atol=1e-14)


class TestPartialSums(object):

    @classmethod
    def setup_class(cls):
        cls.spec = CoefficientSpec(beta=0.7, normalize_unit_variance=True)
        cls.K = 24
        cls.n = 40
        cls.eps = stream(7).standard_normal(cls.n + cls.K)
        cls.path = path_from_innovations(cls.spec, GAUSS, cls.eps, K=cls.K)

    def _pairs(self, m):
        c, eps, K = self.path.coefficients, self.eps, self.K
        total = 0.0
        for t in range(m):
            for j1 in range(K + 1):
                for j2 in range(j1 + 1, K + 1):
                    total += c[j1] * c[j2] * eps[t + K - j1] * eps[t + K - j2]
        return total

    def test_orders_zero_and_one(self):
        assert_equal(partial_sum_y(self.path, 0), float(self.n))
        assert_allclose(partial_sum_y(self.path, 1), np.sum(self.path.x), rtol=1e-12)

    def test_second_order_matches_pairs(self):
        assert_allclose(partial_sum_y(self.path, 2), self._pairs(self.n), rtol=1e-9)

    def test_second_order_track(self):
        track = partial_sum_track(self.path, 2)
        assert_allclose(track[9], self._pairs(10), rtol=1e-9)
        assert_allclose(track[-1], partial_sum_y(self.path, 2), rtol=1e-12)

    def test_two_term_example(self):
        spec = CoefficientSpec(beta=0.7)
        path = path_from_innovations(spec, GAUSS, np.array([2.0, 1.0]), K=1)
        # c = (1, 1): Y_{1,2} = c_0 c_1 eps_1 eps_0
        assert_allclose(partial_sum_y(path, 2), 2.0, rtol=1e-12)

    def test_zero_path(self):
        path = path_from_innovations(self.spec, GAUSS, np.zeros(10 + 3), K=3)
        assert_equal(partial_sum_y(path, 1), 0.0)
        assert_equal(partial_sum_y(path, 2), 0.0)

    def test_unsupported_order(self):
        with pytest.raises(UnsupportedOrderError):
            partial_sum_y(self.path, 3)


class TestAutocovariance(object):

    def test_lag_zero_is_variance(self):
        spec = CoefficientSpec(beta=0.7)
        c = make_coefficients(spec, 50)
        assert_allclose(autocovariance(spec, 0, K=50, sigma_eps2=2.0), 2.0 * np.sum(c * c), rtol=1e-12)

    def test_two_coefficients(self):
        spec = CoefficientSpec(beta=0.7, normalize_unit_variance=True)
        assert_allclose(autocovariance(spec, 1, K=1), 0.5, rtol=1e-12)
        assert_equal(autocovariance(spec, 2, K=1), 0.0)

    def test_fft_matches_direct(self):
        spec = CoefficientSpec(beta=0.65)
        K = 2000
        rho = autocovariances(spec, K)
        for k in (0, 1, 7, 100, 1999):
            assert_allclose(rho[k], autocovariance(spec, k, K=K), rtol=1e-10, atol=1e-10 * rho[0])

    def test_limit_ratio(self):
        beta, k = 0.7, 1000
        spec = CoefficientSpec(beta=beta)
        rho = autocovariance_untruncated(spec, k, K=2 ** 14)
        ratio = rho * k ** (2 * beta - 1) / special.beta(2 * beta - 1, 1 - beta)
        assert_allclose(special.beta(0.4, 0.3), 5.112, atol=1e-3)
        assert abs(ratio - 1.0) <= 0.10

    def test_tail_closed_form_matches_quadrature(self):
        lags = np.array([0, 3, 50, 190])
        closed = autocovariance_tail(CoefficientSpec(beta=0.65, slowly_varying=SlowlyVarying(scale=2.0)), lags, 200)
        # log_power with a = 0 is the same constant factor, integrated numerically
        flat = SlowlyVarying(kind="log_power", scale=2.0, a=0.0)
        numeric = autocovariance_tail(CoefficientSpec(beta=0.65, slowly_varying=flat), lags, 200)
        assert_allclose(closed, numeric, rtol=1e-6)

    def test_tail_restores_longer_filter(self):
        spec = CoefficientSpec(beta=0.6)
        K, big = 256, 2 ** 16
        for k in (1, 40, 200):
            missing = autocovariance(spec, k, K=big) - autocovariance(spec, k, K=K)
            expected = autocovariance_tail(spec, k, K)[0] - autocovariance_tail(spec, k, big)[0]
            assert_allclose(missing, expected, rtol=1e-3)
        with pytest.raises(DomainError):
            autocovariance_tail(spec, [K + 1], K)


class TestSigma(object):

    @classmethod
    def setup_class(cls):
        cls.spec = CoefficientSpec(beta=0.7, normalize_unit_variance=True, truncation_index=512)

    def test_small_n(self):
        rho = autocovariances(self.spec, 512)
        assert_allclose(sigma_np(self.spec, 1, 1), math.sqrt(rho[0]), rtol=1e-12)
        assert_allclose(sigma_np(self.spec, 2, 1), math.sqrt(2 * rho[0] + 2 * rho[1]), rtol=1e-12)

    def test_exact_variance_against_simulation(self):
        n, reps = 256, 2000
        sums = np.array([partial_sum_y(sample_path(self.spec, GAUSS, n, seed=21, rep=r, K=512), 1)
                         for r in range(reps)])
        s2 = sigma_np(self.spec, n, 1) ** 2
        # Gaussian sums: sd of the sample variance is s2 * sqrt(2 / (R - 1))
        se = s2 * math.sqrt(2.0 / (reps - 1))
        assert abs(np.var(sums, ddof=1) - s2) <= 3.0 * se

    def test_second_order_cache_agrees(self):
        so = SecondOrder(self.spec, 512)
        assert_allclose(so.sigma_n1(300), sigma_np(self.spec, 300, 1), rtol=1e-12)

    def test_exact_needs_p_one(self):
        with pytest.raises(UnsupportedOrderError):
            sigma_np(self.spec, 100, 2)

    def test_asymptotic_domain(self):
        # p = 3 at beta = 0.7: 3 * 0.4 >= 1
        with pytest.raises(DomainError):
            sigma_np(self.spec, 100, 3, mode="asymptotic")
        assert_allclose(sigma_np(self.spec, 2 ** 10, 1, mode="asymptotic"), 2.0 ** 8, rtol=1e-12)

    def test_variance_slope(self):
        spec = CoefficientSpec(beta=0.7, normalize_unit_variance=True, truncation_index=2 ** 20)
        so = SecondOrder(spec, 2 ** 20)
        ns = np.array([2.0 ** j for j in range(10, 17)])
        s2 = [so.sigma2_n1(int(n)) for n in ns]
        slope = np.polyfit(np.log(ns), np.log(s2), 1)[0]
        assert abs(slope - 1.6) <= 0.05
