import pytest
from numpy.testing import assert_equal
from pydantic import ValidationError

from src.schemas.experiment import ExperimentConfig
from src.schemas.lrd import CoefficientSpec, InnovationSpec


class TestExperimentConfig(object):

    def test_dyadic_grid(self):
        cfg = ExperimentConfig(n_grid="2^10..2^16")
        assert_equal(cfg.n_grid, [2 ** j for j in range(10, 17)])
        assert_equal(ExperimentConfig(n_grid="2^8, 1000").n_grid, [256, 1000])

    def test_grid_order(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(n_grid="2^9,2^8")
        with pytest.raises(ValidationError):
            ExperimentConfig(n_grid=[])

    def test_trim_levels_sorted(self):
        assert_equal(ExperimentConfig(trim_levels="0.001,0.05,0.01").trim_levels, [0.05, 0.01, 0.001])
        with pytest.raises(ValidationError):
            ExperimentConfig(trim_levels="0.6")

    def test_sizes(self):
        cfg = ExperimentConfig(n=300, n_grid=[256, 512])
        assert_equal(cfg.n_target, 300)
        assert_equal(cfg.n_max, 512)
        assert_equal(ExperimentConfig(n_grid=[256, 512]).n_target, 512)

    def test_limits(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(replications=10)
        with pytest.raises(ValidationError):
            ExperimentConfig(oracle_size=1000)
        with pytest.raises(ValidationError):
            ExperimentConfig(bogus=1)


class TestModelSpecs(object):

    def test_long_memory_exponent(self):
        assert_equal(CoefficientSpec(beta=0.75).long_memory_exponent, 0.5)

    def test_beta_range(self):
        for beta in (0.5, 1.0):
            with pytest.raises(ValidationError):
                CoefficientSpec(beta=beta)

    def test_pareto_moments(self):
        assert_equal(InnovationSpec(law="smoothed_symmetric_pareto", alpha=4.5).alpha, 4.5)
        with pytest.raises(ValidationError):
            InnovationSpec(law="smoothed_symmetric_pareto", alpha=4.0)
