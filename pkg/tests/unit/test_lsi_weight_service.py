import math

import numpy as np
import pytest

from src.models.measure import GridDensity1D, WeightPair
from src.utils.exceptions import DomainError, ZeroDensityError
from src.utils.gauss_core import iso_I, log_iso_I


@pytest.fixture(scope="module")
def exp1(measure_service):
    return measure_service.exp1()


@pytest.fixture(scope="module")
def uniform(measure_service):
    return measure_service.uniform(n=2001)


def _middle(density, lo, hi):
    x = density.grid
    return (x >= lo) & (x <= hi)


class TestBarWeight:
    def test_gaussian_fixed_point(self, weight_service, gaussian):
        """K_bar of the Gaussian is identically one"""
        K = weight_service.kbar(gaussian)
        mask = _middle(gaussian, -6.0, 6.0)
        np.testing.assert_allclose(K[mask], 1.0, atol=1e-5)

    def test_exponential(self, weight_service, exp1):
        """K_bar(x) = x for Exp(1)"""
        K = weight_service.kbar(exp1)
        mask = _middle(exp1, 0.5, 20.0)
        np.testing.assert_allclose(K[mask], exp1.grid[mask], atol=1e-5)

    def test_nonnegative(self, weight_service, measure_service):
        """K_bar >= 0 on the whole grid"""
        assert np.all(weight_service.kbar(measure_service.laplace()) >= 0.0)

    def test_forward_identity_for_centred_measure(self, weight_service, gaussian):
        """Tail form and -(1/p) times the left integral agree"""
        mask = _middle(gaussian, -6.0, 6.0)
        np.testing.assert_allclose(weight_service.kbar(gaussian)[mask],
                                   weight_service.kbar_forward(gaussian)[mask], atol=1e-8)

    def test_zero_density(self, weight_service):
        """Weights divide by the density"""
        density = GridDensity1D(x_min=0.0, x_max=1.0, n=5, values=[0.0, 1.0, 1.0, 1.0, 0.0])
        with pytest.raises(ZeroDensityError):
            weight_service.kbar(density)
        with pytest.raises(ZeroDensityError):
            weight_service.khat(density)


class TestHatWeight:
    def test_gaussian_fixed_point(self, weight_service, gaussian):
        """K_hat of the Gaussian is identically one"""
        K = weight_service.khat(gaussian)
        mask = _middle(gaussian, -6.0, 6.0)
        np.testing.assert_allclose(K[mask], 1.0, atol=1e-6)

    def test_uniform(self, weight_service, uniform):
        """K_hat(x) = I(x) on [0, 1], largest at 1/2"""
        K = weight_service.khat(uniform)
        np.testing.assert_allclose(K[1:-1], iso_I(uniform.grid[1:-1]), atol=1e-6)
        assert np.max(K) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), abs=1e-6)

    def test_underflowed_samples_use_log_density(self, weight_service, measure_service):
        """K_hat of Exp(30) stays finite where e^{-30x} underflows, while K_bar refuses"""
        steep = measure_service.from_log_density(0.0, 40.0, 40001, lambda x: math.log(30.0) - 30.0 * x)
        K = weight_service.khat(steep)
        x = steep.grid
        deep = (x >= 30.0) & (x <= 39.0)
        assert np.all(steep.values[deep] == 0.0)
        expected = np.exp(np.asarray(log_iso_I(-30.0 * x[deep])) - math.log(30.0) + 30.0 * x[deep])
        np.testing.assert_allclose(K[deep], expected, rtol=1e-5)
        assert np.all(np.isfinite(K))
        with pytest.raises(ZeroDensityError):
            weight_service.kbar(steep)

    def test_weight_pair_kinds(self, weight_service, gaussian):
        """Pairs carry their kind and a divergence on the same grid"""
        for kind in ("identity", "kbar", "khat"):
            pair = weight_service.weight_pair(gaussian, kind)
            assert pair.kind == kind
            assert pair.v.shape == (gaussian.n,)

    def test_unknown_kind(self, weight_service, gaussian):
        """Only the three weight kinds exist"""
        with pytest.raises(DomainError):
            weight_service.weight(gaussian, "tilde")


class TestConstants:
    def test_gaussian_bar_constants(self, weight_service, gaussian):
        """alpha = beta = 1 and c = 1 for the Gaussian"""
        constants = weight_service.lsi_constants(gaussian, "kbar")
        assert constants.available
        assert constants.alpha == pytest.approx(1.0, abs=1e-4)
        assert constants.beta == pytest.approx(1.0, abs=1e-4)
        assert constants.c_classical == pytest.approx(1.0, abs=1e-4)

    def test_gaussian_hat_constant(self, weight_service, gaussian):
        """c_hat = 1 for the Gaussian"""
        constants = weight_service.lsi_constants(gaussian, "khat")
        assert constants.c_weighted == 1.0
        assert constants.c_classical == pytest.approx(1.0, abs=1e-4)

    def test_exponential_bar_unavailable(self, weight_service, exp1):
        """K_bar(0) = 0 leaves no bar constant for Exp(1)"""
        constants = weight_service.lsi_constants(exp1, "kbar")
        assert constants.alpha == pytest.approx(0.0, abs=1e-12)
        assert not constants.available
        assert constants.c_classical is None

    def test_invalid_kind(self, weight_service, gaussian):
        """Identity weights have no LSI constants of their own"""
        with pytest.raises(DomainError):
            weight_service.lsi_constants(gaussian, "identity")

    def test_general_pair(self, weight_service, gaussian):
        """K = 1, v = x gives alpha = 1 and c = 1"""
        pair = weight_service.weight_pair(gaussian, "identity")
        constants = weight_service.general_pair_constants(pair, gaussian)
        assert constants.alpha == pytest.approx(1.0, abs=1e-6)
        assert constants.c_classical == pytest.approx(1.0, abs=1e-6)


class TestIsoperimetricProfile:
    def test_gaussian_profile(self, weight_service, gaussian):
        """I_gamma = I"""
        p = np.array([0.01, 0.3, 0.5, 0.8])
        np.testing.assert_allclose(weight_service.iso_function_mu(gaussian, p), iso_I(p), atol=1e-6)

    def test_uniform_profile(self, weight_service, uniform):
        """I_mu = 1 for the uniform law"""
        assert weight_service.iso_function_mu(uniform, 0.37) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("name", ["gaussian", "laplace"])
    def test_ratio_form_of_constant(self, measure_service, weight_service, name):
        """sup (I/I_mu)^2 equals sup K_hat^2"""
        density = measure_service.named(name)
        direct = weight_service.lsi_constants(density, "khat").c_classical
        assert weight_service.khat_ratio_sup(density) == pytest.approx(direct, abs=1e-5)


class TestBakryEmery:
    def test_gaussian_identity_pair(self, weight_service, gaussian):
        """K = 1, v = x: alpha_max = 1, a = -x, residual 0"""
        pair = weight_service.weight_pair(gaussian, "identity")
        result = weight_service.bakry_emery_check(pair, gaussian)
        assert result.alpha_max == pytest.approx(1.0, abs=1e-3)
        np.testing.assert_allclose(result.gamma2_residual, 0.0, atol=1e-3)
        assert result.holds

    def test_gaussian_hat_pair(self, weight_service, gaussian):
        """K_hat v' = 1 for v = Phi_inv(F)"""
        pair = weight_service.weight_pair(gaussian, "khat")
        result = weight_service.bakry_emery_check(pair, gaussian)
        assert result.alpha_max == pytest.approx(1.0, abs=1e-4)
        assert result.min_residual >= -1e-3

    def test_residual_nonnegative_for_any_pair(self, measure_service, weight_service, gaussian):
        """The residual is 4K^2 (K v' - alpha) up to finite differences"""
        K = 1.0 + 0.05 * np.sin(gaussian.grid)
        pair = WeightPair(K=K, v=measure_service.divergence_1d(K, gaussian))
        result = weight_service.bakry_emery_check(pair, gaussian)
        assert result.min_residual >= -1e-3

    def test_nonpositive_weight(self, weight_service, gaussian):
        """K must be positive on the interior"""
        K = np.where(np.abs(gaussian.grid) < 1.0, -1.0, 1.0)
        pair = WeightPair(K=K, v=np.zeros(gaussian.n))
        with pytest.raises(DomainError):
            weight_service.bakry_emery_check(pair, gaussian)


class TestImageLaw:
    def test_hat_divergence_is_standard_normal(self, weight_service, measure_service):
        """v(X) ~ N(0, 1) for X ~ mu and v the divergence of K_hat"""
        result = weight_service.image_law_ks(measure_service.laplace(), samples=100_000, seed=12345)
        assert result.passes
        assert result.statistic < result.critical_value
