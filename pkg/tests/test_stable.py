import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from gbsfatigue.errors import DegenerateLawError, DomainError, QuadratureError
from gbsfatigue.stable import (
    QuadratureConfig,
    StableParams,
    stable_cdf,
    stable_cf,
    stable_pdf,
    stable_quantile,
    stable_sample,
    stable_scale_shift_law,
    stable_sf,
)

alphas = st.sampled_from([1.1, 1.3, 1.5, 1.7, 1.9, 2.0])
sigmas = st.floats(0.2, 5.0)
mus = st.floats(-10.0, 10.0)


def mp_pdf(alpha, z):
    # (1/pi) int_0^inf cos(zu) exp(-u^alpha) du at 40 digits
    with mp.workdps(40):
        f = lambda u: mp.cos(z * u) * mp.exp(-(u**alpha))
        return float(mp.quad(f, mp.linspace(0, 60, 241)) / mp.pi)


def mp_cdf(alpha, z):
    with mp.workdps(40):
        f = lambda u: mp.sin(z * u) * mp.exp(-(u**alpha)) / u
        return float(mp.mpf(1) / 2 + mp.quad(f, mp.linspace(0, 60, 241)) / mp.pi)


class TestParams:
    @pytest.mark.parametrize("alpha", [1.0, 0.5, 2.01, math.nan])
    def test_alpha_range(self, alpha):
        with pytest.raises(DomainError):
            StableParams(alpha)

    @pytest.mark.parametrize("sigma", [0.0, -1.0, math.inf])
    def test_sigma_positive(self, sigma):
        with pytest.raises(DomainError):
            StableParams(1.5, sigma)

    def test_density_at_mode_closed_form(self):
        assert StableParams(1.5).density_at_mode == pytest.approx(math.gamma(2 / 3) / (1.5 * math.pi))


class TestCharacteristicFunction:
    def test_at_zero(self):
        assert stable_cf(StableParams(1.5), 0.0) == 1 + 0j

    def test_gaussian(self):
        assert stable_cf(StableParams(2.0, 1 / math.sqrt(2)), 1.0) == pytest.approx(math.exp(-0.5), abs=1e-15)

    def test_alpha_15_at_two(self):
        value = stable_cf(StableParams(1.5), 2.0)
        assert value == pytest.approx(math.exp(-(2**1.5)), abs=1e-15)
        assert abs(value - 0.05910) < 1e-5

    def test_shift_is_phase(self):
        p = StableParams(1.5, 1.0, 3.0)
        assert stable_cf(p, 0.7) == pytest.approx(np.exp(2.1j - 0.7**1.5))

    def test_matches_empirical_cf(self):
        x = stable_sample(StableParams(1.5), 10**5, 11)
        for t in (0.5, 1.0, 2.0):
            assert abs(np.mean(np.cos(t * x)) - stable_cf(StableParams(1.5), t).real) <= 0.01


class TestPdf:
    def test_mode_alpha_15(self):
        # Gamma(2/3) / (1.5 pi) = 0.2873528...
        assert stable_pdf(StableParams(1.5), 0.0) == pytest.approx(math.gamma(2 / 3) / (1.5 * math.pi), abs=1e-10)
        assert stable_pdf(StableParams(1.5), 0.0) == pytest.approx(0.2873528, abs=1e-7)

    def test_standard_normal_member(self):
        assert stable_pdf(StableParams(2.0, 1 / math.sqrt(2)), 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-15)

    @pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8, 2.0])
    @pytest.mark.parametrize("sigma", [0.5, 1.0, 3.0])
    def test_mode_exact(self, alpha, sigma):
        p = StableParams(alpha, sigma, -1.25)
        assert abs(stable_pdf(p, p.mu) - p.density_at_mode) <= 1e-8

    @pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9])
    @pytest.mark.parametrize("z", [0.3, 1.0, 4.0, 25.0])
    def test_against_mpmath(self, alpha, z):
        assert stable_pdf(StableParams(alpha), z) == pytest.approx(mp_pdf(alpha, z), rel=1e-7, abs=1e-11)

    @pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8])
    def test_integrates_to_one(self, alpha):
        # tail mass beyond L from the asymptote 2 C L^-alpha, C = Gamma(a) sin(pi a/2)/pi
        c = math.gamma(alpha) * math.sin(math.pi * alpha / 2) / math.pi
        L = (2 * c / 1e-6) ** (1 / alpha)
        p = StableParams(alpha)
        total = 2 * integrate.quad(lambda x: stable_pdf(p, x), 0, L, limit=400, points=[1, 10, 100])[0]
        assert abs(total - 1) <= 1e-5 + 1e-6

    def test_gaussian_closed_form(self):
        x = np.linspace(-6, 6, 41)
        p = StableParams(2.0, 0.8, 0.5)
        assert np.max(np.abs(stable_pdf(p, x) - stats.norm.pdf(x, 0.5, 0.8 * math.sqrt(2)))) <= 1e-9

    def test_shape_follows_input(self):
        p = StableParams(1.5)
        assert isinstance(stable_pdf(p, 0.5), float)
        assert stable_pdf(p, np.zeros((2, 3))).shape == (2, 3)


class TestCdf:
    def test_median(self):
        assert stable_cdf(StableParams(1.5), 0.0) == 0.5

    def test_standard_normal_at_one(self):
        assert stable_cdf(StableParams(2.0, 1 / math.sqrt(2)), 1.0) == pytest.approx(0.841344746, abs=1e-9)

    def test_against_sampler(self):
        x = stable_sample(StableParams(1.5), 10**6, 5)
        assert abs(np.mean(x <= 1.0) - stable_cdf(StableParams(1.5), 1.0)) <= 0.005

    @pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9])
    @pytest.mark.parametrize("z", [-7.0, 0.2, 1.5, 12.0])
    def test_against_mpmath(self, alpha, z):
        assert stable_cdf(StableParams(alpha), z) == pytest.approx(mp_cdf(alpha, z), abs=1e-10)

    @pytest.mark.parametrize("alpha", [1.3, 1.7])
    def test_against_levy_stable(self, alpha):
        x = np.array([-3.0, 0.5, 2.0, 10.0])
        ref = stats.levy_stable.cdf(x, alpha, 0.0, scale=2.0, loc=1.0)
        assert np.max(np.abs(stable_cdf(StableParams(alpha, 2.0, 1.0), x) - ref)) <= 1e-7

    @pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8])
    def test_far_tail_relative_accuracy(self, alpha):
        c = math.gamma(alpha) * math.sin(math.pi * alpha / 2) / math.pi
        z = 1e6
        assert stable_sf(StableParams(alpha), z) == pytest.approx(c * z**-alpha, rel=1e-4)

    def test_gaussian_closed_form(self):
        x = np.linspace(-8, 8, 33)
        p = StableParams(2.0, 1.3, -2.0)
        assert np.max(np.abs(stable_cdf(p, x) - stats.norm.cdf(x, -2.0, 1.3 * math.sqrt(2)))) <= 1e-9

    @pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9])
    def test_table_matches_quad(self, alpha):
        p = StableParams(alpha, 1.5, 0.5)
        x = np.concatenate([np.linspace(-40, 40, 81), [1e3, -1e4]])
        assert np.max(np.abs(stable_cdf(p, x, method="table") - stable_cdf(p, x))) <= 1e-8

    def test_unknown_method(self):
        with pytest.raises(DomainError):
            stable_cdf(StableParams(1.5), 0.0, method="series")

    def test_quadrature_failure_reports_estimate(self):
        cfg = QuadratureConfig(atol=1e-15, rtol=1e-15, limit=32)
        with pytest.raises(QuadratureError) as info:
            stable_cdf(StableParams(1.05), 3e9, quad=cfg)
        assert info.value.error_estimate > 0

    @settings(max_examples=40, deadline=None)
    @given(alphas, sigmas, mus, st.floats(0.0, 30.0))
    def test_symmetry_and_bounds(self, alpha, sigma, mu, x):
        p = StableParams(alpha, sigma, mu)
        lo, hi = stable_cdf(p, mu - x), stable_cdf(p, mu + x)
        assert 0.0 <= lo <= 1.0 and 0.0 <= hi <= 1.0
        assert abs(lo - (1.0 - hi)) <= 1e-8

    @settings(max_examples=20, deadline=None)
    @given(alphas, sigmas, mus)
    def test_monotone_on_grid(self, alpha, sigma, mu):
        p = StableParams(alpha, sigma, mu)
        f = stable_cdf(p, np.linspace(mu - 20 * sigma, mu + 20 * sigma, 61))
        assert np.all(np.diff(f) >= -1e-12)


class TestQuantile:
    @settings(max_examples=15, deadline=None)
    @given(alphas, sigmas, mus)
    def test_median_is_mu(self, alpha, sigma, mu):
        assert stable_quantile(StableParams(alpha, sigma, mu), 0.5) == pytest.approx(mu, abs=1e-12)

    def test_standard_normal(self):
        assert stable_quantile(StableParams(2.0, 1 / math.sqrt(2)), 0.84134) == pytest.approx(1.0, abs=1e-4)

    def test_roundtrip_975(self):
        p = StableParams(1.5)
        q = stable_quantile(p, 0.975)
        assert abs(stable_cdf(p, q) - 0.975) <= 1e-8

    @pytest.mark.parametrize("alpha,sigma,mu", [(1.2, 1.0, 0.0), (1.5, 2.0, 1.0), (1.8, 0.5, -3.0)])
    def test_inverts_cdf_on_grid(self, alpha, sigma, mu):
        p = StableParams(alpha, sigma, mu)
        x = np.linspace(mu - 10 * sigma, mu + 10 * sigma, 41)
        assert np.max(np.abs(stable_quantile(p, stable_cdf(p, x)) - x)) <= 1e-7

    def test_small_tail_probability(self):
        p = StableParams(1.5)
        q = stable_quantile(p, 1e-9)
        assert stable_cdf(p, q) == pytest.approx(1e-9, rel=1e-4)

    def test_table_matches_root(self):
        p = StableParams(1.4, 2.0)
        u = np.array([1e-6, 0.01, 0.3, 0.5, 0.77, 0.999])
        assert np.allclose(stable_quantile(p, u, method="table"), stable_quantile(p, u), rtol=1e-6, atol=1e-7)

    @pytest.mark.parametrize("prob", [0.0, 1.0, -0.1, 1.5, math.nan])
    def test_outside_unit_interval(self, prob):
        with pytest.raises(DomainError):
            stable_quantile(StableParams(1.5), prob)


class TestSampler:
    def test_deterministic(self):
        p = StableParams(1.5)
        assert np.array_equal(stable_sample(p, 100, 3), stable_sample(p, 100, 3))

    def test_mean(self):
        assert abs(np.mean(stable_sample(StableParams(1.5, 1.0, 3.0), 10**6, 1)) - 3) <= 0.05

    def test_gaussian_variance(self):
        x = stable_sample(StableParams(2.0, 1 / math.sqrt(2)), 10**6, 2)
        assert abs(np.var(x) - 1) <= 0.01

    def test_bad_size(self):
        with pytest.raises(DomainError):
            stable_sample(StableParams(1.5), 0, 1)

    @pytest.mark.parametrize("alpha,m", [(1.5, 10), (1.8, 25)])
    def test_stability_of_sums(self, alpha, m):
        p = StableParams(alpha, 1.5, 2.0)
        x = stable_sample(p, 2000 * m, 9).reshape(2000, m)
        sums = (x - p.mu).sum(axis=1) / m ** (1 / alpha)
        centred = StableParams(alpha, p.sigma)
        assert stats.kstest(sums, lambda v: stable_cdf(centred, v, method="table")).pvalue > 0.01

    def test_lower_moments_stabilize(self):
        # E|Y|^a' is finite for a' < alpha; the running estimate settles
        x = np.abs(stable_sample(StableParams(1.5), 10**6, 4))
        # E|Y|^p = 2^p Gamma((1+p)/2) Gamma(1-p/alpha) / (sqrt(pi) Gamma(1-p/2))
        exact = 2**0.5 * math.gamma(0.75) * math.gamma(1 - 0.5 / 1.5) / (math.sqrt(math.pi) * math.gamma(0.75))
        est = [np.mean(x[:n] ** 0.5) for n in (10**4, 10**5, 10**6)]
        assert abs(est[-1] - exact) < abs(est[0] - exact) + 0.01
        assert abs(est[-1] - exact) <= 0.01


class TestScaleShift:
    def test_identity(self):
        p = StableParams(1.5)
        assert stable_scale_shift_law(p, 1, 0) == p

    def test_negative_scale(self):
        assert stable_scale_shift_law(StableParams(1.5, 2, 1), -3, 4) == StableParams(1.5, 6, 1)

    def test_degenerate(self):
        with pytest.raises(DegenerateLawError):
            stable_scale_shift_law(StableParams(1.5), 0, 1)

    def test_cdf_transform(self):
        p = StableParams(1.8)
        q = stable_scale_shift_law(p, 2, 0)
        x = np.linspace(-8, 8, 9)
        assert np.max(np.abs(stable_cdf(q, x) - stable_cdf(p, x / 2))) <= 1e-8
