import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal, assert_equal

from src.core.errors import DomainError, EmptyRangeError, UnsupportedOrderError
from src.schemas.lrd import CoefficientSpec, InnovationSpec
from src.services.linear_process import partial_sum_y, path_from_innovations, sample_path, sigma_np
from src.services.marginals import GaussianMarginal
from src.services.processes import (
    EmpiricalState,
    build_process,
    empirical_cdf,
    make_grid,
    masked_sup,
    order_index,
    range_bounds,
    sample_quantile,
    tail_refined_grid,
    uniform_transform,
    v_tilde,
    weighted_sup,
    with_jump_points,
)

X4 = np.array([0.3, -1.2, 2.0, 0.1])


class TestOrderStatistics(object):

    @classmethod
    def setup_class(cls):
        cls.state = EmpiricalState(X4, GaussianMarginal(), sigma=1.0)

    def test_order_index_exact_multiples(self):
        # 10 * 0.3 is 3.0000000000000004 in floating point
        assert_equal(order_index(10, 0.3), 3)
        assert_array_equal(order_index(4, [0.25, 0.26, 0.5, 1.0]), [1, 2, 2, 4])

    def test_order_index_domain(self):
        with pytest.raises(DomainError):
            order_index(4, 0.0)
        with pytest.raises(DomainError):
            order_index(4, 1.5)

    def test_empirical_cdf(self):
        s = self.state
        assert_equal(s.F_n(-5.0), 0.0)
        assert_equal(s.F_n(2.0), 1.0)
        assert_equal(s.F_n(0.1), 0.5)

    def test_sample_quantile(self):
        s = self.state
        assert_equal(s.Q_n(0.25), -1.2)
        assert_equal(s.Q_n(1.0), 2.0)
        assert_equal(s.Q_n(0.5), 0.1)

    def test_path_functions(self):
        # K = 0 and c_0 = 1: the path is the innovation record itself
        path = path_from_innovations(CoefficientSpec(beta=0.7), InnovationSpec(), X4, K=0)
        F_n = empirical_cdf(path)
        assert_allclose(path.x, X4, atol=1e-12)
        assert_array_equal(F_n([-5.0, 0.2, 2.5]), [0.0, 0.5, 1.0])
        assert_allclose(sample_quantile(path, 0.5), 0.1, atol=1e-12)
        assert_allclose(sample_quantile(path, 0.25), -1.2, atol=1e-12)
        with pytest.raises(DomainError):
            sample_quantile(path, 0.0)
        assert_allclose(uniform_transform(path, GaussianMarginal()), GaussianMarginal().cdf(X4), rtol=1e-10)

    def test_uniform_transform_at_zero(self):
        state = EmpiricalState(np.array([-1.0, 0.0, 1.0]), GaussianMarginal(), sigma=1.0)
        assert_equal(state.u_sorted[1], 0.5)

    def test_galois_pair(self):
        x = np.random.default_rng(11).standard_normal(257)
        ties = np.array([1.0, 1.0, 2.0, 3.0, 3.0, 3.0])
        for sample in (x, ties):
            state = EmpiricalState(sample, GaussianMarginal(), sigma=1.0)
            n = state.n
            y = np.concatenate([np.arange(1, n + 1) / n, np.linspace(0.001, 0.999, 499)])
            assert np.all(state.F_n(state.Q_n(y)) >= y)
            assert np.all(state.Q_n(state.F_n(sample)) <= sample)

    def test_quantile_integrates_to_mean(self):
        x = np.random.default_rng(12).standard_normal(101)
        state = EmpiricalState(x, GaussianMarginal(), sigma=1.0)
        # seven equal cells per step of Q_n, so the Riemann sum is exact
        cells = 7 * state.n
        y = (np.arange(1, cells + 1) - 0.5) / cells
        assert_allclose(math.fsum(state.Q_n(y)) / cells, math.fsum(x) / state.n, rtol=1e-12, atol=1e-15)

    def test_inconsistent_marginal(self):
        with pytest.raises(DomainError):
            EmpiricalState(np.array([0.0, 60.0]), GaussianMarginal(), sigma=1.0)


class TestProcesses(object):

    @classmethod
    def setup_class(cls):
        cls.spec = CoefficientSpec(beta=0.65, normalize_unit_variance=True, truncation_index=256)
        cls.path = sample_path(cls.spec, InnovationSpec(), 2000, seed=4)
        cls.marginal = GaussianMarginal(1.0)
        cls.sigma = sigma_np(cls.spec, 2000, 1, K=256)
        cls.state = EmpiricalState(cls.path.x, cls.marginal, cls.sigma)
        cls.grid = tail_refined_grid(63, 8)

    def test_geometric_bound(self):
        # alpha_n(U_(k)) = (n/sigma)(k/n - U_(k)), so |u_n(y) - alpha_n(U_n(y))| = (n/sigma)|y - k/n|
        s = self.state
        y = with_jump_points(self.grid, s.n, s.u_sorted, limit=2 ** 16).points
        gap = np.abs(s.u_n(y) - s.alpha_n(s.U_n(y)))
        assert np.max(gap) <= 1.0 / self.sigma + 1e-9

    def test_bk_identities(self):
        y = self.grid.points
        alpha = build_process(self.path, self.marginal, self.grid, "alpha_n", sigma=self.sigma).values
        u = build_process(self.path, self.marginal, self.grid, "u_n", sigma=self.sigma).values
        q = build_process(self.path, self.marginal, self.grid, "q_n", sigma=self.sigma).values
        bk_u = build_process(self.path, self.marginal, self.grid, "bk_uniform", sigma=self.sigma).values
        bk_g = build_process(self.path, self.marginal, self.grid, "bk_general", sigma=self.sigma).values
        assert_allclose(bk_u, alpha - u, rtol=1e-12, atol=1e-12)
        assert_allclose(bk_g, alpha - self.marginal.density_quantile(y) * q, rtol=1e-12, atol=1e-12)

    def test_default_normalizer(self):
        sample = build_process(self.path, self.marginal, self.grid, "u_n")
        assert_allclose(sample.normalizer, self.sigma, rtol=1e-12)

    def test_v_tilde(self):
        y = self.grid.points
        Y1, Y2 = partial_sum_y(self.path, 1), partial_sum_y(self.path, 2)
        sample = build_process(self.path, self.marginal, self.grid, "v_tilde_np", p=2)
        expected = -self.marginal.density_quantile(y) * Y1 + self.marginal.fprime_at_Q(y) * Y2
        assert_allclose(sample.values, expected, rtol=1e-12)
        with pytest.raises(UnsupportedOrderError):
            v_tilde(self.marginal, y, 3, Y1, Y2)

    def test_scale_equivariance(self):
        c = 3.0
        scaled = self.path.scaled(c)
        scaled_marginal = GaussianMarginal(c * c)
        assert_allclose(partial_sum_y(scaled, 1), c * partial_sum_y(self.path, 1), rtol=1e-12)

        def values(path, marginal, process_id):
            return build_process(path, marginal, self.grid, process_id, sigma=self.sigma).values

        for process_id in ("alpha_n", "u_n", "bk_uniform", "bk_general"):
            assert_allclose(values(scaled, scaled_marginal, process_id), values(self.path, self.marginal, process_id),
                            rtol=1e-9, atol=1e-8)
        y = self.grid.points
        q = values(self.path, self.marginal, "q_n")
        q_scaled = values(scaled, scaled_marginal, "q_n")
        assert_allclose(q_scaled, c * q, rtol=1e-9, atol=1e-8)
        assert_allclose(scaled_marginal.density_quantile(y) * q_scaled, self.marginal.density_quantile(y) * q,
                        rtol=1e-9, atol=1e-8)

        # T_n(y0) = (n / sigma) R~_n(y0)
        y0 = np.array([0.3])
        t_n = EmpiricalState(self.path.x, self.marginal, self.sigma)
        t_n_scaled = EmpiricalState(scaled.x, scaled_marginal, self.sigma)
        assert_allclose(t_n_scaled.alpha_n(y0) - t_n_scaled.u_n(y0), t_n.alpha_n(y0) - t_n.u_n(y0),
                        rtol=1e-9, atol=1e-8)

    def test_unknown_process(self):
        with pytest.raises(DomainError):
            build_process(self.path, self.marginal, self.grid, "gamma_n")

    def test_csv(self, tmp_path):
        sample = build_process(self.path, self.marginal, self.grid, "alpha_n", sigma=self.sigma)
        out = sample.to_csv(tmp_path / "alpha.csv", weight=lambda y: y * (1 - y))
        lines = out.read_text().splitlines()
        assert_equal(lines[0], "y,value,weight,weighted_value")
        assert_equal(len(lines), len(self.grid) + 1)


class TestGrids(object):

    def test_tail_refined(self):
        grid = tail_refined_grid(15, 10)
        assert grid.points[0] == 2.0 ** -10
        assert grid.points[-1] == 1.0 - 2.0 ** -10
        assert np.all(np.diff(grid.points) > 0)

    def test_uniform(self):
        grid = make_grid("uniform", 15, 10)
        assert_allclose(grid.points, np.arange(1, 16) / 16.0)
        with pytest.raises(DomainError):
            make_grid("chebyshev", 15, 10)


class TestSupremum(object):

    def test_zero_values(self):
        y = np.linspace(0.01, 0.99, 99)
        assert_equal(masked_sup(y, np.zeros_like(y)), 0.0)

    def test_power_weight_sup(self):
        y = np.array([0.25, 0.5, 0.75])
        weights = (y * (1 - y)) ** 0.9
        assert_allclose(masked_sup(y, np.ones_like(y), weights), 4.0 ** -0.9, rtol=1e-12)
        assert_allclose(4.0 ** -0.9, 0.28717, atol=1e-5)

    def test_strict_interior(self):
        y = np.array([0.1, 0.5, 0.9])
        assert_equal(masked_sup(y, np.array([5.0, 1.0, 7.0]), lo=0.1, hi=0.9), 1.0)
        with pytest.raises(EmptyRangeError):
            masked_sup(y, np.ones(3), lo=0.5, hi=0.5)

    def test_range_bounds(self):
        assert_equal(range_bounds("full", 100), (0.0, 1.0))
        assert_equal(range_bounds("one_over_n", 100), (0.01, 0.99))
        assert_allclose(range_bounds("delta_trim", 100, c0=2.0, delta_n=0.1), (0.2, 0.8))
        with pytest.raises(DomainError):
            range_bounds("delta_trim", 100)

    def test_weighted_sup_empty(self):
        spec = CoefficientSpec(beta=0.65, truncation_index=16)
        path = sample_path(spec, InnovationSpec(), 64, seed=1)
        sample = build_process(path, GaussianMarginal(1.0), tail_refined_grid(15, 4), "u_n", sigma=1.0)
        with pytest.raises(EmptyRangeError):
            weighted_sup(sample, y_range="delta_trim", delta_n=0.6)
