import math

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import romb

from ordertail import (
    Beta,
    Degenerate,
    DomainError,
    Exponential,
    LogNormal,
    ModelA,
    NumericError,
    Pareto,
    Uniform,
    gaussian_joint_survival,
    grid_max_min,
    log_scale_mixture_tail,
    ratio_limit,
    scale_mixture_tail,
)


class TestScaleMixtureTail:
    def test_degenerate_exact(self):
        model = Pareto(2.0, 1.0)
        for c, t in ((0.5, 10.0), (2.0, 7.0), (1.0, 3.0)):
            assert scale_mixture_tail(Degenerate(c), model, t) == pytest.approx(
                model.tail(t / c), rel=1e-14)

    def test_degenerate_zero(self):
        assert scale_mixture_tail(Degenerate(0.0), Pareto(2.0, 1.0), 5.0) == 0.0

    def test_pareto_uniform_exactness(self):
        # int_0^1 (c/t)^2 dc = t^-2 / 3, exact for t >= 1
        for t in (1.0, 10.0, 1e5):
            assert scale_mixture_tail(Uniform(1.0), Pareto(2.0, 1.0), t,
                                      rel_tol=1e-12) == pytest.approx(
                t ** -2 / 3.0, rel=1e-10)

    def test_exponential_uniform_vs_romberg(self):
        # independent fixed-grid Romberg oracle on int_0^1 exp(-20/c) dc
        t = 20.0
        n = 2 ** 14
        c = np.linspace(0.0, 1.0, n + 1)
        with np.errstate(divide="ignore"):
            integrand = np.where(c > 0, np.exp(-t / np.maximum(c, 1e-12)), 0.0)
        oracle = romb(integrand, dx=1.0 / n)
        value = scale_mixture_tail(Uniform(1.0), Exponential(1.0), t,
                                   rel_tol=1e-10)
        assert value == pytest.approx(oracle, rel=1e-6)

    def test_model_a_atom_plus_sublaw(self):
        model = ModelA(1.0, 0.5, 0.5)
        marginal = LogNormal(0.0, 1.0)
        t = 50.0
        atom = 0.5 * marginal.tail(t)
        sub = 0.5 * scale_mixture_tail(Uniform(0.5), marginal, t, rel_tol=1e-11)
        assert scale_mixture_tail(model, marginal, t, rel_tol=1e-11) == \
            pytest.approx(atom + sub, rel=1e-9)

    @pytest.mark.parametrize("weight", [Uniform(1.0), Beta(2.0, 3.0),
                                        Beta(0.7, 1.5), ModelA(1.0, 0.5, 0.5),
                                        Uniform(2.0), Beta(2.0, 3.0, omega=2.0)])
    @pytest.mark.parametrize("marginal", [Pareto(2.0, 1.0), LogNormal(0.0, 1.0),
                                          Exponential(1.0)])
    def test_bounded_by_endpoint_scaling(self, weight, marginal):
        for t in (5.0, 50.0, 500.0):
            value = log_scale_mixture_tail(weight, marginal, t)
            assert value <= marginal.log_tail(t / weight.omega) + 1e-9

    def test_self_consistency_on_tolerance(self):
        weight, marginal, t = Beta(2.0, 3.0), LogNormal(0.0, 1.0), 100.0
        loose = log_scale_mixture_tail(weight, marginal, t, rel_tol=1e-6)
        tight = log_scale_mixture_tail(weight, marginal, t, rel_tol=1e-12)
        assert abs(loose - tight) < 1e-6

    def test_below_threshold_is_certain(self):
        assert log_scale_mixture_tail(Uniform(1.0), Pareto(2.0, 1.0), 0.0) == 0.0
        assert log_scale_mixture_tail(Uniform(1.0), Pareto(2.0, 1.0), -3.0) == 0.0

    def test_extreme_boundary_layer_raises(self):
        # endpoint mass so thin the u-range leaves double precision
        with pytest.raises(NumericError):
            log_scale_mixture_tail(Beta(2.0, 220.0), LogNormal(0.0, 1.0), 1e15)

    def test_deep_tail_stays_in_log_space(self):
        # far below the smallest positive double
        value = log_scale_mixture_tail(Uniform(1.0), Exponential(1.0), 5000.0)
        assert -5010.0 < value < -4990.0


class TestRatioLimit:
    def test_equal_functions(self):
        trend = ratio_limit(lambda t: t ** -2, lambda t: t ** -2,
                            np.geomspace(10, 1e4, 5))
        np.testing.assert_allclose(trend.ratios, 1.0)
        assert trend.trending_to_one
        assert trend.monotone

    def test_log_correction(self):
        f = lambda t: t ** -2.0
        g = lambda t: t ** -2.0 * (1.0 + 1.0 / math.log(t))
        grid = np.geomspace(10, 1e8, 8)
        trend = ratio_limit(f, g, grid)
        assert trend.trending_to_one
        assert abs(trend.final - 1.0) < 1.0 / math.log(grid[-1])

    def test_constant_ratio_not_trending(self):
        m = Pareto(2.0, 1.0)
        trend = ratio_limit(lambda t: m.tail(2 * t), lambda t: m.tail(t),
                            np.geomspace(10, 1e4, 5))
        np.testing.assert_allclose(trend.ratios, 0.25, rtol=1e-12)
        assert not trend.trending_to_one

    def test_nonpositive_rejected(self):
        with pytest.raises(DomainError):
            ratio_limit(lambda t: -1.0, lambda t: 1.0, [1.0, 2.0])


class TestGridMaxMin:
    def test_independent_case(self):
        assert grid_max_min(0.0) == pytest.approx(math.sqrt(0.5), abs=1e-6)

    def test_half_correlation(self):
        assert grid_max_min(0.5) == pytest.approx(0.8660254, abs=1e-6)

    def test_near_comonotone(self):
        assert grid_max_min(0.9999) > 0.999

    def test_domain(self):
        with pytest.raises(DomainError):
            grid_max_min(1.0)


class TestGaussianJointSurvival:
    def test_independent_product(self):
        value = gaussian_joint_survival(1.0, 2.0, 0.0)
        expected = stats.norm.sf(1.0) * stats.norm.sf(2.0)
        assert value == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("rho", [-0.6, 0.3, 0.9])
    def test_vs_scipy_mvn(self, rho):
        cov = np.array([[1.0, rho], [rho, 1.0]])
        mvn = stats.multivariate_normal(mean=[0.0, 0.0], cov=cov)
        for z1, z2 in ((0.0, 0.0), (1.0, 2.0), (2.5, 1.5)):
            expected = mvn.cdf([-z1, -z2])  # survival by symmetry
            assert gaussian_joint_survival(z1, z2, rho) == pytest.approx(
                expected, rel=1e-5)

    def test_monotone_in_rho(self):
        values = [gaussian_joint_survival(2.0, 2.0, rho)
                  for rho in (-0.5, 0.0, 0.5, 0.9)]
        assert np.all(np.diff(values) > 0)

    def test_deep_joint_tail_positive(self):
        value = gaussian_joint_survival(8.0, 8.0, 0.5)
        assert 0.0 < value < stats.norm.sf(8.0)

    def test_vectorized(self):
        z = np.array([0.5, 1.0, 2.0])
        out = gaussian_joint_survival(z, z, 0.3)
        assert out.shape == (3,)
        assert np.all(np.diff(out) < 0)
