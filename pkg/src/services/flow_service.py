import logging
import math
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from ..config.settings import settings
from ..models.measure import GridDensity1D, WeightPair
from ..models.report import FlowResult
from ..utils.exceptions import DomainError, IntegrationFailureError

logger = logging.getLogger(__name__)

# RK4 stays stable while dt * Lipschitz constant is below this
_STABILITY = 0.5


class FlowService:
    """Flows of the one-dimensional field x' = K(x) h."""

    def __init__(self, dt: Optional[float] = None, max_steps: Optional[int] = None):
        self.dt = dt if dt is not None else settings.flow_dt
        self.max_steps = max_steps if max_steps is not None else settings.flow_max_steps

    def field(self, pair: WeightPair, density: GridDensity1D) -> CubicSpline:
        if pair.K.shape != (density.n,):
            raise DomainError("weight must be tabulated on the density grid")
        return CubicSpline(density.grid, pair.K)

    def _step_count(self, field: CubicSpline, h: float, t_final: float) -> int:
        lipschitz = float(np.max(np.abs(field.derivative()(field.x)))) * abs(h)
        steps = max(math.ceil(t_final / self.dt), math.ceil(t_final * lipschitz / _STABILITY), 1)
        if steps > self.max_steps:
            raise IntegrationFailureError(
                f"flow needs {steps} steps, above the limit of {self.max_steps}; K is too stiff"
            )
        return steps

    @staticmethod
    def _rk4(field: CubicSpline, h: float, x: np.ndarray, t_final: float, steps: int) -> np.ndarray:
        dt = t_final / steps
        for _ in range(steps):
            k1 = h * field(x)
            k2 = h * field(x + 0.5 * dt * k1)
            k3 = h * field(x + 0.5 * dt * k2)
            k4 = h * field(x + dt * k3)
            x = x + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        return x

    def flow_points(self, field: CubicSpline, h: float, t_final: float, points) -> FlowResult:
        """Psi_t at the given points with a Richardson estimate of the integration error."""
        if t_final < 0.0 or not math.isfinite(t_final) or not math.isfinite(h):
            raise DomainError("t_final must be a finite nonnegative time and h finite")
        x0 = np.asarray(points, dtype=float)
        if h == 0.0 or t_final == 0.0:
            return FlowResult(grid_map=x0.copy(), step_count=0, max_step_error_estimate=0.0)

        steps = self._step_count(field, h, t_final)
        coarse = self._rk4(field, h, x0, t_final, steps)
        fine = self._rk4(field, h, x0, t_final, 2 * steps)
        if not np.all(np.isfinite(fine)):
            raise IntegrationFailureError("flow produced non-finite values")
        error = float(np.max(np.abs(fine - coarse))) / 15.0
        logger.debug("flow h=%.3g t=%.3g: %d steps, error estimate %.3g", h, t_final, 2 * steps, error)
        return FlowResult(grid_map=fine, step_count=2 * steps, max_step_error_estimate=error)

    def flow_map(self, pair: WeightPair, density: GridDensity1D, h: float, t_final: float = 1.0,
                 points=None) -> FlowResult:
        """RK4 flow of x' = K(x) h from the grid nodes (or the given points) over [0, t_final]."""
        field = self.field(pair, density)
        start = density.grid if points is None else points
        return self.flow_points(field, h, t_final, start)

    def inverse_map(self, pair: WeightPair, density: GridDensity1D, h: float, points) -> FlowResult:
        """Psi_1^{-1}: the time-one flow of the reversed field -K h."""
        return self.flow_map(pair, density, -h, 1.0, points)
