import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_equal
from scipy import integrate

from src.core.errors import DomainError, UnsupportedOrderError
from src.core.streams import stream
from src.schemas.lrd import CoefficientSpec, InnovationSpec
from src.services.innovations import draw_innovations, innovation_variance
from src.services.marginals import (
    ExponentialMarginal,
    GaussianMarginal,
    LogisticMarginal,
    MarginalModel,
    SmoothedParetoMarginal,
    condition_report,
    marginal_from_name,
)
from src.services.marginals.oracle import oracle_marginal_from_simulation

LEVELS = np.array([0.01, 0.1, 0.3, 0.5, 0.8, 0.99])


class TestGaussian(object):

    @classmethod
    def setup_class(cls):
        cls.model = GaussianMarginal(1.0)

    def test_density_quantile(self):
        assert_allclose(self.model.density_quantile(0.5), 0.3989423, rtol=1e-7)
        assert_allclose(self.model.fprime_at_Q(0.5), 0.0, atol=1e-15)
        assert_allclose(self.model.fprime_at_Q(0.3), 0.18233, atol=1e-5)

    def test_chain_rule(self):
        m = self.model
        assert_allclose(m.score_deriv(LEVELS), m.fprime_at_Q(LEVELS) / m.density_quantile(LEVELS), rtol=1e-12)
        generic = MarginalModel.second_deriv(m, LEVELS)
        assert_allclose(m.second_deriv(LEVELS), generic, rtol=1e-10)

    def test_quantile_inverts_cdf(self):
        m = GaussianMarginal(2.5)
        assert_allclose(m.cdf(m.quantile(LEVELS)), LEVELS, rtol=1e-12)

    def test_bad_variance(self):
        with pytest.raises(DomainError):
            GaussianMarginal(0.0)


class TestLogistic(object):

    def test_closed_forms(self):
        m = LogisticMarginal()
        assert_allclose(m.density_quantile(0.5), 0.25, rtol=1e-15)
        assert_allclose(m.score_deriv(0.25), 0.5, rtol=1e-15)
        assert_allclose(m.second_deriv(LEVELS), -2.0, rtol=1e-15)

    def test_derivatives_against_pdf(self):
        m = LogisticMarginal(1.5)
        x = m.quantile(LEVELS)
        h = 1e-5
        numeric = (m.pdf(x + h) - m.pdf(x - h)) / (2 * h)
        assert_allclose(m.fprime_at_Q(LEVELS), numeric, rtol=1e-6, atol=1e-10)


class TestExponential(object):

    def test_tail_exponents(self):
        m = ExponentialMarginal()
        assert_equal(m.gamma, 0.0)
        assert_equal(m.gamma0, 1.0)
        assert_allclose(m.density_quantile(LEVELS), 1.0 - LEVELS, rtol=1e-15)


class TestSmoothedPareto(object):

    @classmethod
    def setup_class(cls):
        cls.model = SmoothedParetoMarginal(5.0, 0.5)

    def test_moment_condition(self):
        with pytest.raises(DomainError):
            SmoothedParetoMarginal(4.0)
        with pytest.raises(ValueError):
            InnovationSpec(law="smoothed_symmetric_pareto", alpha=3.5)

    def test_density(self):
        m = self.model
        x = np.array([0.1, 0.9, 1.5, 2.0, 7.0])
        assert_allclose(m.pdf(-x), m.pdf(x), rtol=1e-15)
        total = 2.0 * (integrate.quad(m.pdf, 0.0, m.b)[0] + integrate.quad(m.pdf, m.b, np.inf)[0])
        assert_allclose(total, 1.0, rtol=1e-8)

    def test_continuous_at_junction(self):
        m = self.model
        assert_allclose(m.pdf(m.b - 1e-9), m.pdf(m.b + 1e-9), rtol=1e-6)

    def test_quantile_inverts_cdf(self):
        assert_allclose(self.model.cdf(self.model.quantile(LEVELS)), LEVELS, rtol=1e-10)

    def test_variance(self):
        m = self.model
        second, _ = integrate.quad(lambda x: x * x * m.pdf(x), 0.0, m.b)
        tail, _ = integrate.quad(lambda x: x * x * m.pdf(x), m.b, np.inf)
        assert_allclose(m.variance, 2.0 * (second + tail), rtol=1e-8)

    def test_tail_starts_at_bridge_end(self):
        m = self.model
        assert_equal(m.b, 1.5)
        x = np.array([1.5, 2.0, 9.0])
        assert_allclose(m.pdf(x) * m._Z, 2.5 * x ** -6.0, rtol=1e-12)
        # the bridge stays below the Pareto curve it replaces
        inside = np.array([1.1, 1.3])
        assert np.all(m.pdf(inside) * m._Z < 2.5 * inside ** -6.0)

    def test_tail_exponent_along_dyadic_levels(self):
        m = self.model
        y = 2.0 ** -np.arange(6, 41)
        fq = m.density_quantile(y)
        local = np.log2(fq[:-1] / fq[1:])
        assert_equal(m.gamma1, 1.2)
        assert_allclose(local[-20:], m.gamma1, atol=1e-10)
        csr3 = y * np.abs(m.fprime_at_Q(y)) / fq ** 2
        assert_allclose(csr3[-20:], m.gamma1, rtol=1e-10)

    def test_unit_variance_draws(self):
        spec = InnovationSpec(law="smoothed_symmetric_pareto", alpha=6.0)
        draws = draw_innovations(spec, stream(5), 200_000)
        assert_equal(innovation_variance(spec), 1.0)
        assert abs(np.var(draws) - 1.0) < 0.05


class TestDerivativeConsistency(object):

    @classmethod
    def setup_class(cls):
        cls.models = [GaussianMarginal(1.0), LogisticMarginal(1.5), SmoothedParetoMarginal(5.0, 0.5),
                      ExponentialMarginal(2.0)]
        cls.y = np.linspace(0.01, 0.99, 99)
        cls.h = 1e-5

    def test_first_derivative(self):
        y, h = self.y, self.h
        for m in self.models:
            numeric = (m.density_quantile(y + h) - m.density_quantile(y - h)) / (2 * h)
            assert_allclose(m.score_deriv(y), numeric, atol=1e-4, err_msg=m.name)

    def test_second_derivative(self):
        y, h = self.y, self.h
        for m in self.models:
            numeric = (m.score_deriv(y + h) - m.score_deriv(y - h)) / (2 * h)
            assert_allclose(m.second_deriv(y), numeric, atol=1e-4, err_msg=m.name)


class TestConditions(object):

    def test_gaussian_order_two(self):
        report = condition_report(GaussianMarginal(), 2)
        assert report.C
        assert not report.A
        assert_equal(report.gamma, min(report.gamma1, report.gamma2))

    def test_logistic_order_two(self):
        report = condition_report(LogisticMarginal(), 2)
        assert report.A
        assert report.B
        assert report.C_numeric

    def test_pareto_fails_b(self):
        report = condition_report(marginal_from_name("pareto", alpha=5.0), 1)
        assert not report.B
        assert report.csr4_monotone

    def test_unsupported_order(self):
        with pytest.raises(UnsupportedOrderError):
            condition_report(GaussianMarginal(), 4)

    def test_unknown_name(self):
        with pytest.raises(DomainError):
            marginal_from_name("cauchy")


class TestOracle(object):

    @classmethod
    def setup_class(cls):
        cls.spec = CoefficientSpec(beta=0.7, normalize_unit_variance=True)
        cls.oracle = oracle_marginal_from_simulation(cls.spec, InnovationSpec(), 100_000, seed=3, K=64)

    def test_symmetric_median(self):
        o = self.oracle
        iqr = float(o.quantile(0.75) - o.quantile(0.25))
        assert abs(float(o.quantile(0.5))) <= 3.0 * iqr / np.sqrt(o.m)

    def test_close_to_gaussian(self):
        exact = GaussianMarginal(1.0)
        assert_allclose(self.oracle.variance, 1.0, rtol=1e-12)
        assert_allclose(self.oracle.quantile([0.1, 0.9]), exact.quantile([0.1, 0.9]), atol=0.03)
        assert_allclose(self.oracle.density_quantile(0.5), exact.density_quantile(0.5), atol=0.02)

    def test_minimum_size(self):
        with pytest.raises(DomainError):
            oracle_marginal_from_simulation(self.spec, InnovationSpec(), 1000, seed=3, K=64)


class TestOracleAccuracy(object):

    @classmethod
    def setup_class(cls):
        spec = CoefficientSpec(beta=0.7, normalize_unit_variance=True)
        cls.m = 1_000_000
        cls.oracle = oracle_marginal_from_simulation(spec, InnovationSpec(), cls.m, seed=8, K=64)

    def test_cdf_inverts_quantile(self):
        y = np.linspace(0.01, 0.99, 197)
        assert np.max(np.abs(self.oracle.cdf(self.oracle.quantile(y)) - y)) <= 2.0 / np.sqrt(self.m)

    def test_density_quantile_within_five_percent(self):
        y = np.linspace(0.05, 0.95, 91)[1:-1]
        exact = GaussianMarginal(1.0).density_quantile(y)
        assert_allclose(self.oracle.density_quantile(y), exact, rtol=0.05)
