import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal, assert_equal

from src.core.config import Settings
from src.core.errors import ConfigError, DegenerateTargetError, DomainError
from src.event_bus import EventBus
from src.services.experiments import (
    build_setup,
    quantile_confidence_band,
    run_band,
    run_bk_general_experiment,
    run_bk_uniform_experiment,
    run_cbp,
    run_coverage_experiment,
    run_covcheck,
    run_empirical_reduction_experiment,
    run_lil_tracker,
    run_quantile_gap_experiment,
    run_rates,
    run_reduction_experiment,
    run_reduction_p2_experiment,
    run_simulate,
    run_subordinated_comparison,
    run_trimmed_mean_test,
    trimmed_sum,
)
from src.services.experiments.bands import band_constants, validate_band_exponent
from src.services.experiments.subordination import subordinate
from src.services.marginals import ExponentialMarginal, GaussianMarginal, LogisticMarginal
from src.services.report_service import ReportService

from tests.helpers import small_config


def _checks(report):
    return {c.name: c for c in report.checks}


class TestDiagnostics(object):

    def test_cbp(self):
        report = run_cbp(small_config(beta=0.75))
        assert_allclose(report.values("c_beta_p")[0], 3.7395, atol=1e-3)
        assert report.values("beta_identity_residual")[0] <= 1e-8
        assert report.passed

    def test_rates_table(self):
        report = run_rates(small_config(beta=0.7, p=2, n_grid=[1024, 2048]))
        table = report.tables["rates"]
        assert_equal(table.columns[:3], ["n", "a_n", "b_n"])
        assert_allclose(table.rows[0][1], 0.48401, atol=1e-4)
        assert_equal(report.values("long_branch", n=1024), [1.0])

    def test_simulate(self, lab_settings):
        cfg = small_config(n=8, seed=1, truncation_index=None)
        first = run_simulate(cfg, app_settings=lab_settings)
        second = run_simulate(cfg, app_settings=lab_settings)
        assert_equal(len(first.tables["path"].rows), 8)
        assert_equal(first.tables["path"].rows, second.tables["path"].rows)
        assert_equal([r[0] for r in first.tables["path"].rows], list(range(1, 9)))

    def test_beta_identity_across_beta(self):
        for beta in (0.55, 0.65, 0.75, 0.85, 0.95):
            report = run_cbp(small_config(beta=beta))
            assert report.values("beta_identity_residual")[0] <= 1e-8, beta
            assert _checks(report)["beta_identity"].passed

    @pytest.mark.slow
    def test_covcheck(self):
        report = run_covcheck(small_config(beta=0.7, n_grid="2^10..2^16", truncation_index=None))
        checks = _checks(report)
        assert checks["covariance_ratio@1000"].passed
        assert checks["covariance_ratio_trend"].passed
        assert checks["sigma2_slope"].passed
        assert checks["fft_direct_equivalence"].passed

    @pytest.mark.slow
    def test_variance_slope_across_beta(self):
        for beta in (0.6, 0.7, 0.8):
            report = run_covcheck(small_config(beta=beta, n_grid="2^10..2^16", truncation_index=None))
            slope = report.values("slope_sigma2_n1")[0]
            assert abs(slope - (3.0 - 2.0 * beta)) <= 0.05, (beta, slope)
            assert _checks(report)["fft_direct_equivalence"].passed
            # the truncated model alone bends away from the limit slope
            assert report.values("slope_sigma2_n1_truncated")[0] < slope

    def test_covcheck_short_filter(self):
        with pytest.raises(DomainError):
            run_covcheck(small_config(truncation_index=10))


class TestTrimming(object):

    def test_untrimmed_sum(self):
        x = np.sort(np.random.default_rng(3).standard_normal(101))
        assert_equal(trimmed_sum(x, 0.0), math.fsum(x))

    def test_over_trim(self):
        with pytest.raises(DomainError):
            trimmed_sum(np.arange(4.0), 0.5)
        with pytest.raises(DomainError):
            run_trimmed_mean_test(small_config(trim_rule="fixed", trim_value=0.5))

    def test_smoke_and_workers(self, lab_settings):
        cfg = small_config()
        one = run_trimmed_mean_test(cfg, build_setup(cfg, lab_settings))
        cfg4 = cfg.model_copy(update={"workers": 4})
        four = run_trimmed_mean_test(cfg4, build_setup(cfg4, lab_settings))
        assert_equal([r.model_dump() for r in one.rows], [r.model_dump() for r in four.rows])
        assert_equal(len(one.values("trimmed", n=512)), cfg.replications)
        assert "ks_trimmed_mean" in _checks(one)


class TestReduction(object):

    @classmethod
    def setup_class(cls):
        cls.cfg = small_config()
        cls.setup = build_setup(cls.cfg, Settings(bootstrap_samples=20, jump_point_limit=2 ** 10))

    def test_quantile_reduction(self):
        bus = EventBus()
        seen = []
        bus.subscribe("replication_batch_finished", lambda e: seen.append(e.n))
        report = run_reduction_experiment(self.cfg, self.setup, bus)
        assert_equal(seen, [256, 512])
        d = np.array(report.values("D_n", n=256))
        assert_equal(d.shape, (50,))
        assert np.all(d > 0)
        assert "slope_D_n" in _checks(report)
        assert_equal(report.parameters["command"], "reduce")
        assert_equal(report.parameters["derived"]["truncation_K"], 256)

    def test_order_two(self):
        report = run_reduction_p2_experiment(self.cfg, self.setup)
        assert_equal(report.parameters["derived"]["p"], 2)
        assert len(report.values("sup_dev_p1", n=512)) == 50

    def test_order_two_needs_short_memory(self):
        with pytest.raises(DomainError):
            run_reduction_p2_experiment(small_config(beta=0.8), self.setup)

    def test_empirical(self):
        report = run_empirical_reduction_experiment(self.cfg, self.setup)
        assert_allclose(report.values("expected_slope_S_n")[0], 0.7)

    def test_quantile_gap(self):
        report = run_quantile_gap_experiment(self.cfg, self.setup)
        assert {"slope_gap", "slope_general_reduction"} <= set(_checks(report))


class TestBahadurKiefer(object):

    @classmethod
    def setup_class(cls):
        cls.cfg = small_config()
        cls.setup = build_setup(cls.cfg, Settings(bootstrap_samples=20, jump_point_limit=2 ** 10))

    def test_uniform(self):
        report = run_bk_uniform_experiment(self.cfg, self.setup)
        assert_allclose(report.parameters["derived"]["limit_coefficient"], 0.18233, atol=1e-5)
        assert len(report.values("T_n", n=512)) == 50

    def test_general_full_range(self):
        report = run_bk_general_experiment(self.cfg, self.setup)
        assert_equal(report.parameters["derived"]["sup_range"], "full")
        assert "factor_one_half" in _checks(report)

    def test_degenerate_target(self):
        cfg = small_config(y0=0.5)
        with pytest.raises(DegenerateTargetError):
            run_bk_uniform_experiment(cfg, self.setup)

    def test_lil(self):
        report = run_lil_tracker(self.cfg, self.setup)
        assert_equal(len(report.values("M")), 2)
        assert len(report.values("conjectural_Y2")) == 2
        assert "lil_partial_sums" in _checks(report)


class TestBands(object):

    def test_constants(self):
        c_nu, z = band_constants(0.9, 0.05)
        assert_allclose(c_nu, 0.28717, atol=1e-5)
        assert_allclose(z, 1.95996, atol=1e-5)

    def test_zero_width(self):
        x = np.random.default_rng(1).standard_normal(200)
        band = quantile_confidence_band(x, 10.0, 0.9, 1.0, np.linspace(0.01, 0.99, 50))
        assert_array_equal(band.lower, band.upper)
        assert np.all((band.y > 1 / 200) & (band.y < 1 - 1 / 200))

    def test_exponent_rows(self):
        flags = GaussianMarginal().flags
        assert validate_band_exponent(0.65, 1.0, flags, 0.9).startswith("beta < 3/4 with")
        with pytest.raises(ConfigError):
            validate_band_exponent(0.65, 1.0, flags, 0.5)
        with pytest.raises(ConfigError):
            validate_band_exponent(0.8, 1.0, flags, 1.0)

    def test_band_and_coverage(self, lab_settings):
        cfg = small_config()
        setup = build_setup(cfg, lab_settings)
        band = run_band(cfg, setup)
        assert_equal(band.tables["band"].columns, ["y", "lower", "center", "upper", "true_quantile"])
        coverage = run_coverage_experiment(cfg, setup)
        value = coverage.values("coverage")[0]
        assert 0.0 <= value <= 1.0


class TestSubordination(object):

    def test_transform(self):
        z = np.array([-2.0, 0.0, 1.5])
        assert_allclose(subordinate(z, GaussianMarginal(4.0)), 2.0 * z, rtol=1e-14)
        assert_allclose(subordinate(z, ExponentialMarginal()), ExponentialMarginal().quantile(
            GaussianMarginal().cdf(z)), rtol=1e-12)
        logistic = LogisticMarginal()
        assert_allclose(subordinate(z, logistic), logistic.quantile(GaussianMarginal().cdf(z)), rtol=1e-12)

    def test_smoke(self, lab_settings):
        cfg = small_config()
        report = run_subordinated_comparison(cfg, build_setup(cfg, lab_settings))
        assert {"identity_equivalence", "subordination_contrast"} <= set(_checks(report))
        assert any("below 1/n" in note for note in report.notes)
        assert_equal(report.tables["profile"].columns[0], "trim_level")

    def test_gaussian_target(self, lab_settings):
        cfg = small_config(target="gaussian")
        report = run_subordinated_comparison(cfg, build_setup(cfg, lab_settings))
        assert "subordination_contrast" not in _checks(report)

    def test_needs_gaussian_base(self):
        with pytest.raises(ConfigError):
            run_subordinated_comparison(small_config(innovation="double_exponential", marginal="oracle"))


class TestDeterminism(object):
    """Same config and seed: identical CSV bodies whatever the worker count."""

    def _bodies(self, runner, lab_settings, tmp_path):
        bodies = []
        for workers in (1, 4, 8):
            cfg = small_config(workers=workers)
            report = runner(cfg, build_setup(cfg, lab_settings))
            path = ReportService().write_rows(report, tmp_path / f"run_{workers}.csv")
            # the first line echoes the parameters, workers included
            bodies.append(path.read_bytes().split(b"\n", 1)[1])
        return bodies

    def test_reduction(self, lab_settings, tmp_path):
        one, four, eight = self._bodies(run_reduction_experiment, lab_settings, tmp_path)
        assert one.count(b"\n") > 100
        assert_equal(four, one)
        assert_equal(eight, one)

    def test_bk_uniform(self, lab_settings, tmp_path):
        one, four, eight = self._bodies(run_bk_uniform_experiment, lab_settings, tmp_path)
        assert_equal(four, one)
        assert_equal(eight, one)


@pytest.mark.slow
class TestAcceptance(object):
    """Full-size Monte Carlo runs; minutes each."""

    def test_reduction_slope(self):
        cfg = small_config(n_grid="2^10..2^16", replications=200, truncation_index=None, grid_size=4095,
                           tail_depth=16)
        report = run_reduction_experiment(cfg)
        assert _checks(report)["slope_D_n"].passed

    def test_uniform_weak_limit(self):
        n = 2 ** 15
        cfg = small_config(n=n, n_grid=[2 ** 14, n], replications=300, truncation_index=None, y0=0.3)
        report = run_bk_uniform_experiment(cfg)
        assert report.values("ks_T_n_vs_aZ2", n=n)[0] <= 0.15
        assert _checks(report)["ks_uniform_bk"].passed

    def test_subordination_contrast(self):
        n = 2 ** 14
        cfg = small_config(n=n, n_grid=[n], replications=100, truncation_index=None)
        report = run_subordinated_comparison(cfg)
        checks = _checks(report)
        assert checks["subordination_contrast"].passed
        assert report.values("identity_sign_test_p", n=n)[0] > 0.05
        assert checks["identity_equivalence"].passed

    def test_general_to_uniform_ratio(self):
        cfg = small_config(n=2 ** 15, n_grid=[2 ** 14, 2 ** 15], replications=200, truncation_index=None)
        report = run_bk_general_experiment(cfg)
        assert _checks(report)["factor_one_half"].passed

    def test_band_coverage(self):
        cfg = small_config(n=2 ** 14, n_grid=[2 ** 14], replications=300, truncation_index=None)
        report = run_coverage_experiment(cfg)
        assert report.values("coverage")[0] >= 0.90

    def test_trimmed_clt(self):
        cfg = small_config(n=2 ** 14, n_grid=[2 ** 12, 2 ** 13, 2 ** 14], replications=300, truncation_index=None)
        report = run_trimmed_mean_test(cfg)
        assert _checks(report)["ks_trimmed_mean"].passed
