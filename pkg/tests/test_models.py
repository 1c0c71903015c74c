import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate, special, stats

from wmlab import models
from wmlab.errors import ConfigError, ConvergenceError, DomainError, UnsupportedModelError
from wmlab.models import HostModel, abs_moment, amr, mvr, q, q_inv


class TestHostModel:
    def test_rejects_nonpositive(self):
        with pytest.raises(ConfigError):
            HostModel.ggd(0.0, 1.0)
        with pytest.raises(ConfigError):
            HostModel.weibull(1.0, -1.0)
        with pytest.raises(ConfigError):
            HostModel.cauchy(0.0)

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            HostModel("laplace", c=1.0, sigma_x=1.0)

    def test_beta_and_amplitude(self):
        m = HostModel.ggd(0.7, 3.0)
        beta = math.sqrt(special.gamma(3 / 0.7) / special.gamma(1 / 0.7)) / 3.0
        assert_allclose(m.beta, beta, rtol=1e-13)
        assert_allclose(m.amplitude, beta * 0.7 / (2 * special.gamma(1 / 0.7)), rtol=1e-13)

    @pytest.mark.parametrize("c", [0.5, 1.0, 2.0, 3.3])
    def test_density_normalized(self, c):
        m = HostModel.ggd(c, 2.0)
        total = 2 * integrate.quad(lambda x: models.pdf(m, x), 0, np.inf)[0]
        assert_allclose(total, 1.0, rtol=1e-9)

    def test_special_cases(self):
        x = np.linspace(-4, 4, 17)
        assert_allclose(models.pdf(HostModel.ggd(2.0, 1.5), x), stats.norm.pdf(x, scale=1.5),
                        rtol=1e-12)
        b = 1.5 / math.sqrt(2)
        assert_allclose(models.pdf(HostModel.ggd(1.0, 1.5), x), stats.laplace.pdf(x, scale=b),
                        rtol=1e-12)

    def test_dict_round_trip(self):
        for m in (HostModel.ggd(0.6, 4), HostModel.weibull(0.05, 1.5), HostModel.cauchy(2)):
            assert HostModel.from_dict(m.to_dict()) == m
        with pytest.raises(ConfigError):
            HostModel.from_dict({"kind": "ggd", "c": 1, "sigma_x": 1, "shape": 2})


class TestPdf:
    def test_spot_values(self):
        assert_allclose(models.pdf(HostModel.cauchy(1.0), 0.0), 0.3183098861837907, rtol=1e-12)
        assert_allclose(models.pdf(HostModel.ggd(2.0, 1.0), 0.0), 0.3989422804014327, rtol=1e-12)
        assert_allclose(models.pdf(HostModel.weibull(1.0, 1.0), 0.5), 0.6065306597126334,
                        rtol=1e-12)

    def test_weibull_negative(self):
        with pytest.raises(DomainError):
            models.pdf(HostModel.weibull(1.0, 1.0), -0.1)

    @pytest.mark.parametrize("m", [HostModel.ggd(0.5, 3.0), HostModel.weibull(2.0, 1.7),
                                   HostModel.cauchy(0.5)])
    def test_cdf_ppf_inverse(self, m):
        p = np.array([1e-6, 0.01, 0.3, 0.5, 0.8, 0.999])
        assert_allclose(models.cdf(m, models.ppf(m, p)), p, rtol=1e-9, atol=1e-15)


class TestMoments:
    def test_spot_values(self):
        assert_allclose(abs_moment(HostModel.ggd(2.0, 1.0), 1.0), math.sqrt(2 / math.pi),
                        rtol=1e-13)
        assert_allclose(abs_moment(HostModel.weibull(2.0, 1.0), 1.0), 2.0, rtol=1e-13)
        assert_allclose(abs_moment(HostModel.ggd(1.0, 1.0), 2.0), 1.0, rtol=1e-13)

    @pytest.mark.parametrize("c, xi", [(0.5, 0.5), (0.5, 1.3), (1.7, 2.0), (3.0, 0.25)])
    def test_against_quadrature(self, c, xi):
        m = HostModel.ggd(c, 2.0)
        ref = 2 * integrate.quad(lambda x: x**xi * models.pdf(m, x), 0, np.inf)[0]
        assert_allclose(abs_moment(m, xi), ref, rtol=1e-8)

    def test_cauchy(self):
        m = HostModel.cauchy(2.0)
        ref = 2 * integrate.quad(lambda x: x**0.5 * models.pdf(m, x), 0, np.inf)[0]
        assert_allclose(abs_moment(m, 0.5), ref, rtol=1e-7)
        with pytest.raises(UnsupportedModelError):
            abs_moment(m, 1.0)
        with pytest.raises(UnsupportedModelError):
            mvr(m, 0.5)


class TestMvr:
    def test_laplacian_unit(self):
        assert_allclose(mvr(HostModel.ggd(1.0, 10.0), 1.0), 1.0, rtol=1e-12)

    def test_spot_values_c069(self):
        m = HostModel.ggd(0.69, 1.0)
        got = [mvr(m, xi) for xi in (0.5, 0.69, 1.0, 1.5)]
        assert_allclose(got, [0.823, 0.831, 0.814, 0.734], atol=1e-3)

    def test_closed_form_c_half(self):
        assert_allclose(mvr(HostModel.ggd(0.5, 1.0), 1.0), 6 / math.sqrt(84), rtol=1e-12)

    def test_amr_values(self):
        m = HostModel.ggd(0.5, 1.0)
        assert_allclose(amr(m, 0.5), 1 / math.sqrt(6), rtol=1e-12)
        assert_allclose(amr(m, 1.0), 6 / math.sqrt(120), rtol=1e-12)
        assert_allclose(amr(HostModel.ggd(2.0, 1.0), 2.0), 2 / math.sqrt(3), rtol=1e-12)

    def test_amr_gaussian_monte_carlo(self):
        x = models.sample(HostModel.ggd(2.0, 1.0), 10**6, 5).values
        emp = 2 * np.mean(x**2) / math.sqrt(np.mean(x**4))
        assert_allclose(emp, 2 / math.sqrt(3), rtol=5e-3)

    def test_weibull_mvr_at_shape(self):
        for d in (0.7, 1.0, 2.5):
            assert_allclose(mvr(HostModel.weibull(3.0, d), d), d, rtol=1e-12)


class TestEstimate:
    def test_cauchy_constant_magnitude(self):
        x = np.array([3.0, -3.0] * 60)
        assert_allclose(models.estimate(x, "cauchy").gamma, 3.0, rtol=1e-10)

    def test_weibull_recovery(self):
        x = models.sample(HostModel.weibull(0.05, 1.5), 10**6, 11).values
        m = models.estimate(x, "weibull")
        assert 0.049 <= m.theta <= 0.051
        assert 1.48 <= m.delta <= 1.52

    def test_gaussian_recovery(self):
        x = models.classic_sample(HostModel.ggd(2.0, 1.0), 10**6, 12).values
        m = models.estimate(x, "ggd")
        assert 1.95 <= m.c <= 2.05
        assert 0.99 <= m.sigma_x <= 1.01

    def test_too_few(self):
        with pytest.raises(ConfigError):
            models.estimate(np.ones(50), "ggd")

    def test_non_convergence_reports_residual(self):
        with pytest.raises(ConvergenceError) as info:
            models.estimate(np.full(200, 2.0), "ggd")
        assert info.value.residual is not None


class TestSample:
    def test_length_and_positivity(self):
        b = models.sample(HostModel.weibull(1.0, 0.8), 1234, 3)
        assert len(b) == 1234
        assert np.all(b.values > 0)

    def test_deterministic(self):
        m = HostModel.ggd(0.7, 2.0)
        assert_allclose(models.sample(m, 100, 9).values, models.sample(m, 100, 9).values,
                        rtol=0, atol=0)

    def test_weibull_mean(self):
        x = models.sample(HostModel.weibull(1.0, 2.0), 10**6, 21).values
        assert abs(x.mean() - special.gamma(1.5)) < 0.003

    def test_laplacian_moments(self):
        x = models.sample(HostModel.ggd(1.0, 10.0), 10**6, 22).values
        assert 99 <= x.var() <= 101
        assert abs(x.mean()) < 0.04

    def test_heavy_tail_mean_abs(self):
        m = HostModel.ggd(0.5, 10.0)
        ref = 2 * integrate.quad(lambda x: x * models.pdf(m, x), 0, np.inf, limit=200)[0]
        x = models.sample(m, 10**6, 23).values
        assert_allclose(np.mean(np.abs(x)), ref, rtol=5e-3)

    def test_sampler_range(self):
        with pytest.raises(ConfigError):
            models.sample(HostModel.ggd(0.05, 1.0), 10, 0)

    @pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
    def test_classic_matches_general(self, c):
        m = HostModel.ggd(c, 3.0)
        a = models.classic_sample(m, 10**5, 1).values
        b = models.sample(m, 10**5, 2).values
        assert stats.ks_2samp(a, b).pvalue > 0.01


class TestQ:
    def test_values(self):
        assert q(0.0) == 0.5
        assert_allclose(q(1.0), 0.15865525393145707, rtol=1e-14)
        assert q_inv(0.5) == 0.0

    def test_inverse(self):
        p = np.array([1e-12, 1e-6, 0.01, 0.3, 0.7, 0.999999])
        assert_allclose(q(q_inv(p)), p, rtol=1e-12)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            q_inv(p)
