import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.utils.exceptions import DomainError, InfiniteQuantileError
from src.utils.gauss_core import (
    Phi,
    Phi_inv,
    iso_derivative,
    iso_expansion_residual,
    iso_I,
    log_iso_I,
    phi,
    shift_generator,
    shift_semigroup,
    survival,
)

probabilities = st.floats(min_value=1e-6, max_value=1.0 - 1e-6)


class TestGaussianFunctions:
    def test_phi_and_Phi_at_zero(self):
        """phi(0) = 1/sqrt(2 pi) and Phi(0) = 1/2"""
        assert phi(0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-15)
        assert Phi(0.0) == 0.5

    def test_scalar_in_scalar_out(self):
        """Scalars come back as floats, arrays as arrays"""
        assert isinstance(Phi(1.0), float)
        assert isinstance(Phi(np.array([1.0, 2.0])), np.ndarray)

    def test_survival_is_reflected_cdf(self):
        """1 - Phi(x) keeps relative accuracy in the upper tail"""
        assert survival(8.0) == Phi(-8.0)
        assert survival(8.0) > 0.0

    def test_non_finite_input_rejected(self):
        """Non-finite x raises a domain error"""
        with pytest.raises(DomainError):
            Phi(float("nan"))

    def test_quantile_round_trip_deep_tail(self):
        """Phi(Phi_inv(p)) = p down to p = 1e-300"""
        p = np.logspace(-300, -1, 300)
        np.testing.assert_allclose(Phi(Phi_inv(p)), p, rtol=1e-10)

    def test_quantile_known_values(self):
        """Phi_inv(0.975) = 1.959963984540054"""
        assert Phi_inv(0.975) == pytest.approx(1.959963984540054, abs=1e-13)
        assert Phi_inv(0.5) == pytest.approx(0.0, abs=1e-15)

    def test_known_values(self):
        """phi(1), Phi and Phi_inv at the 90% point"""
        assert phi(1.0) == pytest.approx(0.24197072451914337, rel=1e-14)
        assert Phi(1.2815515655446004) == pytest.approx(0.9, abs=1e-12)
        assert Phi_inv(0.1) == pytest.approx(-1.2815515655446004, abs=1e-12)

    def test_round_trip_absolute_error(self):
        """|Phi(Phi_inv(p)) - p| <= 1e-12 from 1e-300 up to 1 - 1e-16"""
        p = np.concatenate((np.logspace(-300, -1, 5000), 1.0 - np.logspace(-16, -1, 5000)))
        assert np.max(np.abs(Phi(Phi_inv(p)) - p)) <= 1e-12

    def test_phi_of_huge_argument(self):
        """phi underflows to zero quietly"""
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert phi(1e200) == 0.0
            assert np.all(phi(np.array([-1e300, 1e300])) == 0.0)

    def test_quantile_of_endpoints(self):
        """0 and 1 have infinite quantiles"""
        with pytest.raises(InfiniteQuantileError):
            Phi_inv(0.0)
        with pytest.raises(InfiniteQuantileError):
            Phi_inv(1.0)

    def test_quantile_outside_unit_interval(self):
        """p outside [0, 1] is a domain error"""
        with pytest.raises(DomainError):
            Phi_inv(1.5)

    @given(probabilities)
    @settings(max_examples=200, deadline=None)
    def test_quantile_antisymmetry(self, p):
        """Phi_inv(1 - p) = -Phi_inv(p)"""
        assert Phi_inv(1.0 - p) == pytest.approx(-Phi_inv(p), abs=1e-7)


class TestIsoperimetricFunction:
    def test_endpoints_and_center(self):
        """I(0) = I(1) = 0 and I(1/2) = 1/sqrt(2 pi)"""
        assert iso_I(0.0) == 0.0
        assert iso_I(1.0) == 0.0
        assert iso_I(0.5) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-14)

    @given(probabilities)
    @settings(max_examples=200, deadline=None)
    def test_symmetry(self, p):
        """I(p) = I(1 - p)"""
        assert iso_I(p) == pytest.approx(iso_I(1.0 - p), rel=1e-6, abs=1e-15)

    @given(st.floats(min_value=0.01, max_value=0.99))
    @settings(max_examples=100, deadline=None)
    def test_concavity(self, p):
        """Second differences of I are negative"""
        d = 1e-3
        assert iso_I(p - d) + iso_I(p + d) - 2.0 * iso_I(p) < 0.0

    def test_second_derivative(self):
        """I'' = -1/I"""
        p, d = 0.3, 1e-4
        second = (iso_I(p + d) - 2.0 * iso_I(p) + iso_I(p - d)) / (d * d)
        assert second == pytest.approx(-1.0 / iso_I(p), rel=1e-5)

    def test_derivative(self):
        """I'(p) = -Phi_inv(p) matches a central difference"""
        p, d = 0.2, 1e-6
        numeric = (iso_I(p + d) - iso_I(p - d)) / (2.0 * d)
        assert iso_derivative(p) == pytest.approx(numeric, rel=1e-7)

    def test_value_at_tenth(self):
        """I(0.1) = phi(Phi_inv(0.1))"""
        assert iso_I(0.1) == pytest.approx(0.17549833193248685, rel=1e-13)

    def test_log_form_matches(self):
        """log_iso_I(log q) = log I(q) where I is representable"""
        q = np.logspace(-299, math.log10(0.5), 400)
        np.testing.assert_allclose(log_iso_I(np.log(q)), np.log(iso_I(q)), rtol=1e-10)

    def test_log_form_far_tail(self):
        """log q = -2000 still gives a finite log I; log 0 gives -inf"""
        value = log_iso_I(-2000.0)
        assert -2000.0 < value < -1990.0
        assert log_iso_I(-np.inf) == -np.inf
        with pytest.raises(DomainError):
            log_iso_I(math.log(0.9))

    def test_tiny_argument_is_positive(self):
        """I stays positive just above the cutoff"""
        assert iso_I(1e-250) > 0.0


class TestExpansionResidual:
    def test_uncentred_residual_shrinks(self):
        """|kappa| decreases along eps = 1e-4, 1e-6, 1e-8"""
        values = [abs(iso_expansion_residual(eps)) for eps in (1e-4, 1e-6, 1e-8)]
        assert values[0] > values[1] > values[2]

    def test_centred_residual_is_small(self):
        """Adding back log(2 pi)/2 leaves a small residual"""
        assert abs(iso_expansion_residual(1e-4, centered=True)) < 0.2
        assert abs(iso_expansion_residual(1e-8, centered=True)) < 0.05

    def test_out_of_range(self):
        """eps must lie in (0, 1/2)"""
        with pytest.raises(DomainError):
            iso_expansion_residual(0.6)
        with pytest.raises(DomainError):
            iso_expansion_residual(0.0)


class TestShiftSemigroup:
    def test_composition(self):
        """R_{r1} R_{r2} = R_{r1 + r2} and S_r R_r = id on random triples"""
        rng = np.random.default_rng(7)
        p = rng.uniform(0.0, 1.0, 1000)
        r1 = rng.uniform(0.0, 2.0, 1000)
        r2 = rng.uniform(0.0, 2.0, 1000)
        for pk, a, b in zip(p, r1, r2):
            composed = shift_semigroup(shift_semigroup(pk, b, "+"), a, "+")
            assert composed == pytest.approx(shift_semigroup(pk, a + b, "+"), abs=1e-12)
            back = shift_semigroup(shift_semigroup(pk, 0.5 * a, "+"), 0.5 * a, "-")
            assert back == pytest.approx(pk, abs=1e-12)

    def test_endpoints_are_fixed(self):
        """R_r(0) = 0 and R_r(1) = 1"""
        assert shift_semigroup(0.0, 1.0) == 0.0
        assert shift_semigroup(1.0, 1.0) == 1.0

    def test_zero_shift_is_identity(self):
        """R_0 = S_0 = id"""
        assert shift_semigroup(0.3, 0.0, "+") == pytest.approx(0.3, abs=1e-14)
        assert shift_semigroup(0.3, 0.0, "-") == pytest.approx(0.3, abs=1e-14)

    def test_invalid_arguments(self):
        """Negative r and unknown signs are rejected"""
        with pytest.raises(DomainError):
            shift_semigroup(0.3, -1.0)
        with pytest.raises(DomainError):
            shift_semigroup(0.3, 1.0, "*")

    @pytest.mark.parametrize("p", [0.05, 0.5, 0.9])
    def test_generator_limit(self, p):
        """(R_r(p) - p)/r tends to I(p)"""
        assert shift_generator(p, 1e-6) == pytest.approx(iso_I(p), abs=1e-5)

    @pytest.mark.parametrize("r", [0.1, 0.5, 2.0])
    def test_concavity_and_convexity(self, r):
        """R_r is concave and S_r convex on random chords"""
        rng = np.random.default_rng(11)
        p1, p2, lam = rng.uniform(0.0, 1.0, (3, 2000))
        mid = lam * p1 + (1.0 - lam) * p2
        for sign in ("+", "-"):
            at_mid, at_p1, at_p2 = (np.asarray(shift_semigroup(p, r, sign)) for p in (mid, p1, p2))
            chord = lam * at_p1 + (1.0 - lam) * at_p2
            if sign == "+":
                assert np.all(at_mid >= chord - 1e-12)
            else:
                assert np.all(at_mid <= chord + 1e-12)

    def test_reflection(self):
        """S_r(p) = 1 - R_r(1 - p)"""
        p = np.linspace(0.001, 0.999, 999)
        for r in (0.2, 1.0, 3.0):
            reflected = 1.0 - np.asarray(shift_semigroup(1.0 - p, r, "+"))
            np.testing.assert_allclose(shift_semigroup(p, r, "-"), reflected, rtol=0.0, atol=1e-13)

    def test_generator_error_decreases(self):
        """max_p |(R_r(p) - p)/r - I(p)| shrinks along r = 1e-3, 1e-5, 1e-7"""
        p = np.linspace(0.01, 0.99, 99)
        iso = np.asarray(iso_I(p))
        errors = [np.max(np.abs(np.asarray(shift_generator(p, r)) - iso)) for r in (1e-3, 1e-5, 1e-7)]
        assert errors[0] > errors[1] > errors[2]
