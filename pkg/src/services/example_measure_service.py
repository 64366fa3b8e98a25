import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Optional

import numpy as np
from scipy.special import ndtr

from ..config.settings import settings
from ..models.measure import GridDensity1D
from ..models.report import PunctureRow, PunctureSweep
from ..utils.exceptions import ConstructionError, DomainError
from ..utils.gauss_core import LOG_SQRT_2PI, SQRT_2PI
from ..utils.quadrature import cumulative
from .lsi_weight_service import LsiWeightService
from .measure_service import MeasureService

logger = logging.getLogger(__name__)

PUNCTURE_STEP = 1e-3
PUNCTURE_MARGIN = 10.0
# relative slack for the numerically evaluated drift sandwich
_SANDWICH_SLACK = 1e-2


class ExampleMeasureService:
    """The oscillating-drift density and the punctured Gaussian family."""

    def __init__(self, measure_service: Optional[MeasureService] = None,
                 weight_service: Optional[LsiWeightService] = None,
                 workers: Optional[int] = None):
        self.measures = measure_service or MeasureService()
        self.weights = weight_service or LsiWeightService(self.measures)
        self.workers = workers or settings.sweep_workers

    # ------------------------------------------------------------------
    # Oscillating drift
    # ------------------------------------------------------------------
    def example1_density(self, a: float, b: float, R: float, amplitude: float,
                         x_min: float = -10.0, x_max: float = 10.0,
                         n: Optional[int] = None) -> GridDensity1D:
        """
        Density proportional to exp(-q) with q'(x) = x (m + amplitude * sin(|x|^3)), m = (a + b)/2.

        The drift then satisfies b x^2 <= q'(x) x <= a x^2 while -v_mu' carries
        the unbounded term 3 amplitude |x|^3 cos(|x|^3).
        """
        if not (a > 0.0 and b > 0.0 and b <= a):
            raise ConstructionError("need 0 < b <= a")
        if R <= 0.0:
            raise ConstructionError("R must be positive")
        if amplitude < 0.0 or amplitude > 0.5 * (a - b):
            raise ConstructionError(
                f"amplitude {amplitude} breaks the drift sandwich; it must lie in [0, {(a - b) / 2}]"
            )
        n = n or settings.grid_n
        grid = np.linspace(x_min, x_max, n)
        middle = 0.5 * (a + b)
        drift = grid * (middle + amplitude * np.sin(np.abs(grid) ** 3))
        log_raw = -cumulative(drift, grid[1] - grid[0])
        log_raw -= np.max(log_raw)
        density = self.measures.normalize(GridDensity1D(
            x_min=x_min, x_max=x_max, n=n, values=np.exp(log_raw), log_values=log_raw,
            strictly_positive=True, label="example1",
        ))

        window = self.measures.effective_window(density)
        x = grid[window]
        restoring = -self.measures.log_gradient(density)[window] * x
        outside = np.abs(x) > R
        upper = a * x * x * (1.0 + _SANDWICH_SLACK) + settings.tol_fd
        lower = b * x * x * (1.0 - _SANDWICH_SLACK) - settings.tol_fd
        if np.any(restoring[outside] > upper[outside]) or np.any(restoring[outside] < lower[outside]):
            raise ConstructionError("numerical drift leaves the sandwich b x^2 <= -v_mu x <= a x^2")
        logger.info("example1 density built: a=%g b=%g R=%g amplitude=%g", a, b, R, amplitude)
        return density

    def curvature_floor(self, density: GridDensity1D) -> float:
        """min of -v_mu' over the effective window."""
        window = self.measures.effective_window(density)
        slope = np.gradient(self.measures.log_gradient(density), density.dx, edge_order=2)
        return float(np.min(-slope[window]))

    # ------------------------------------------------------------------
    # Punctured Gaussian
    # ------------------------------------------------------------------
    @staticmethod
    def puncture_constant(R: float) -> float:
        """C_R, the normalising factor of the punctured Gaussian."""
        if not math.isfinite(R) or R < 0.0:
            raise DomainError("R must be a finite nonnegative number")
        if R == 0.0:
            return 1.0
        middle = -math.expm1(-2.0 * R * R) / (R * SQRT_2PI)
        return 1.0 / (0.5 + middle + float(ndtr(-2.0 * R)))

    def puncture_measure(self, R: float, step: float = PUNCTURE_STEP) -> GridDensity1D:
        """C_R phi(x) off [0, 2R] and C_R e^{-Rx}/sqrt(2 pi) on it."""
        C_R = self.puncture_constant(R)
        x_min = -PUNCTURE_MARGIN
        x_max = 2.0 * R + PUNCTURE_MARGIN
        n = int(round((x_max - x_min) / step)) + 1
        log_c = math.log(C_R)

        def log_density(x):
            on_plateau = (x >= 0.0) & (x <= 2.0 * R)
            return np.where(on_plateau, log_c - LOG_SQRT_2PI - R * x, log_c - LOG_SQRT_2PI - 0.5 * x * x)

        density = self.measures.from_log_density(x_min, x_max, n, log_density, label=f"puncture(R={R:g})")
        logger.debug("puncture R=%g: C_R=%.12g, n=%d", R, C_R, n)
        return density

    def _puncture_row(self, R: float) -> PunctureRow:
        density = self.puncture_measure(R)
        constants = self.weights.lsi_constants(density, "khat")
        return PunctureRow(R=R, C_R=self.puncture_constant(R), sup_khat=constants.beta,
                           c_hat=constants.c_classical)

    def puncture_sweep(self, R_values: Iterable[float]) -> PunctureSweep:
        """sup K_hat and c_hat across R, evaluated concurrently and reported in input order."""
        R_values = list(R_values)
        if not R_values:
            raise DomainError("R list is empty")
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            rows = list(pool.map(self._puncture_row, R_values))
        sweep = PunctureSweep(rows=rows, max_c_hat=max(row.c_hat for row in rows))
        logger.info("puncture sweep over %d values of R, max c_hat=%.6g", len(rows), sweep.max_c_hat)
        return sweep
