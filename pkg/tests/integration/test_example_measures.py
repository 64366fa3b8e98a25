"""
The punctured Gaussian family and the oscillating-drift density.
"""
import numpy as np
import pytest

from src.services.example_measure_service import ExampleMeasureService
from src.services.verification_service import VerificationService

RADII = [0.0, 0.25, 0.5, 1.0, 2.0, 5.0]


@pytest.fixture(scope="module")
def examples(measure_service, weight_service):
    return ExampleMeasureService(measure_service, weight_service)


@pytest.fixture(scope="module")
def verifier(measure_service, weight_service):
    return VerificationService(measure_service, weight_service)


def test_puncture_divergence_identities(examples, measure_service, weight_service):
    """
    The divergence identities survive the kinks at 0 and 2R
    """
    density = examples.puncture_measure(1.0, step=1e-4)
    window = measure_service.effective_window(density)
    inner = slice(window.start + 5, window.stop - 5)
    hat = measure_service.divergence_1d(weight_service.khat(density), density)
    bar = measure_service.divergence_1d(weight_service.kbar(density), density)
    centred = density.grid - measure_service.mean(density)
    assert np.max(np.abs(hat - weight_service.gaussian_score(density))[inner]) <= 1e-4
    assert np.max(np.abs(bar - centred)[inner]) <= 1e-4


@pytest.mark.parametrize("R", RADII)
def test_puncture_family(examples, measure_service, weight_service, verifier, R):
    """
    Unit mass, K_hat <= 1 off the plateau and the weighted LSI with K_hat
    """
    density = examples.puncture_measure(R)
    assert measure_service.mass(density) == pytest.approx(1.0, abs=1e-8)

    window = measure_service.effective_window(density)
    x = density.grid[window]
    K = weight_service.khat(density)[window]
    off_plateau = (x < 0.0) | (x > 2.0 * R)
    assert np.max(K[off_plateau]) <= 1.0 + 1e-6

    bumps = verifier.bump_family(int(round(100 * R)), 20, verifier.default_window(density))
    report = verifier.lsi_check(density, weight_service.khat(density), 1.0, bumps)
    assert not report.violated


def test_puncture_sweep_is_bounded(examples):
    """
    The hat constant stays finite over the sampled radii
    """
    sweep = examples.puncture_sweep(RADII)
    assert [row.R for row in sweep.rows] == RADII
    assert sweep.rows[0].c_hat == pytest.approx(1.0, abs=1e-4)
    assert np.isfinite(sweep.max_c_hat)
    assert all(row.C_R >= 1.0 for row in sweep.rows)


def test_oscillating_drift(examples, measure_service, weight_service, verifier):
    """
    Curvature is unbounded below yet K_bar >= 1/a right of R and the LSI holds with inf K_bar
    """
    a, b, R = 2.0, 0.5, 1.0
    density = examples.example1_density(a, b, R, 0.75)
    assert examples.curvature_floor(density) < -10.0

    window = measure_service.effective_window(density)
    x = density.grid[window]
    K = weight_service.kbar(density)[window]
    assert np.min(K[x > R]) >= 1.0 / a - 1e-3

    constants = weight_service.lsi_constants(density, "kbar")
    assert constants.available
    bumps = verifier.bump_family(3, 50, verifier.default_window(density))
    report = verifier.lsi_check(density, weight_service.kbar(density), constants.alpha, bumps)
    assert not report.violated
