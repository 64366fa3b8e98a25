import logging
import math
from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import xlogy

from ..config.settings import settings
from ..models.measure import DiscreteMeasure, GridDensity1D
from ..utils.exceptions import (
    DomainError,
    InvalidDensityError,
    UnboundedSupportError,
    ZeroDensityError,
)
from ..utils.quadrature import integrate, log_cumulative, monotone_cumulative

logger = logging.getLogger(__name__)

Measure = Union[GridDensity1D, DiscreteMeasure]

NAMED_MEASURES = ("gaussian", "uniform", "exp1", "laplace")
# tails below this are recomputed in log space when samples underflow
_TAIL_FLOOR = 1e-250


class MeasureService:
    """Functionals of one-dimensional grid densities and discrete measures."""

    def __init__(self, tol_mass: Optional[float] = None, edge_log_margin: Optional[float] = None):
        self.tol_mass = tol_mass if tol_mass is not None else settings.tol_mass
        self.edge_log_margin = edge_log_margin if edge_log_margin is not None else settings.edge_log_margin

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------
    def from_log_density(self, x_min: float, x_max: float, n: int, log_fn, label: str = "custom") -> GridDensity1D:
        """Tabulate exp(log_fn(x)) on the grid and normalise it."""
        grid = np.linspace(x_min, x_max, n)
        log_values = np.asarray(log_fn(grid), dtype=float)
        density = GridDensity1D(
            x_min=x_min, x_max=x_max, n=n,
            values=np.exp(log_values), log_values=log_values,
            strictly_positive=True, label=label,
        )
        return self.normalize(density)

    def gaussian(self, scale: float = 1.0, x_min: Optional[float] = None,
                 x_max: Optional[float] = None, n: Optional[int] = None) -> GridDensity1D:
        if scale <= 0.0:
            raise DomainError("scale must be positive")
        x_min = settings.grid_x_min * scale if x_min is None else x_min
        x_max = settings.grid_x_max * scale if x_max is None else x_max
        log_norm = math.log(scale) + 0.5 * math.log(2.0 * math.pi)
        return self.from_log_density(
            x_min, x_max, n or settings.grid_n,
            lambda x: -0.5 * (x / scale) ** 2 - log_norm, label="gaussian",
        )

    def uniform(self, x_min: Optional[float] = None, x_max: Optional[float] = None,
                n: Optional[int] = None) -> GridDensity1D:
        x_min = 0.0 if x_min is None else x_min
        x_max = 1.0 if x_max is None else x_max
        return self.from_log_density(x_min, x_max, n or settings.grid_n, np.zeros_like, label="uniform")

    def exp1(self, x_min: Optional[float] = None, x_max: Optional[float] = None,
             n: Optional[int] = None) -> GridDensity1D:
        x_min = 0.0 if x_min is None else x_min
        x_max = 40.0 if x_max is None else x_max
        if x_min < 0.0:
            raise DomainError("Exp(1) lives on [0, inf)")
        return self.from_log_density(x_min, x_max, n or settings.grid_n, lambda x: -x, label="exp1")

    def laplace(self, x_min: Optional[float] = None, x_max: Optional[float] = None,
                n: Optional[int] = None) -> GridDensity1D:
        x_min = -40.0 if x_min is None else x_min
        x_max = 40.0 if x_max is None else x_max
        return self.from_log_density(
            x_min, x_max, n or settings.grid_n, lambda x: -np.abs(x) - math.log(2.0), label="laplace",
        )

    def named(self, name: str, x_min: Optional[float] = None, x_max: Optional[float] = None,
              n: Optional[int] = None) -> GridDensity1D:
        """Built-in measure by name."""
        builders = {
            "gaussian": self.gaussian,
            "uniform": self.uniform,
            "exp1": self.exp1,
            "laplace": self.laplace,
        }
        if name not in builders:
            raise DomainError(f"unknown measure '{name}', expected one of {', '.join(NAMED_MEASURES)}")
        return builders[name](x_min=x_min, x_max=x_max, n=n)

    # ------------------------------------------------------------------
    # Mass, CDF, quantiles
    # ------------------------------------------------------------------
    def mass(self, density: GridDensity1D) -> float:
        return integrate(density.values, density.dx)

    def normalize(self, density: GridDensity1D) -> GridDensity1D:
        """Rescale the samples to unit quadrature mass."""
        values = density.values
        if not np.all(np.isfinite(values)) or np.any(values < 0.0):
            raise InvalidDensityError("density samples must be finite and nonnegative")
        total = self.mass(density)
        if not np.any(values > 0.0) or not total > 0.0:
            raise InvalidDensityError("density is identically zero")
        log_values = None
        if density.log_values is not None:
            log_values = density.log_values - math.log(total)
        normalized = GridDensity1D(
            x_min=density.x_min, x_max=density.x_max, n=density.n,
            values=values / total, log_values=log_values,
            strictly_positive=density.strictly_positive, label=density.label,
        )
        logger.debug("normalized %s density, raw mass %.17g", density.label, total)
        return normalized

    def is_normalized(self, density: GridDensity1D) -> bool:
        return abs(self.mass(density) - 1.0) <= self.tol_mass

    def tail_probabilities(self, density: GridDensity1D) -> Tuple[np.ndarray, np.ndarray]:
        """CDF and survival function at the nodes, each accumulated from its own end."""
        lower = monotone_cumulative(density.values, density.dx)
        upper = monotone_cumulative(density.values, density.dx, from_right=True)
        return lower / lower[-1], upper / upper[0]

    def log_tail_probabilities(self, density: GridDensity1D) -> Tuple[np.ndarray, np.ndarray]:
        """
        log F and log(1 - F) at the nodes.

        Where the density samples underflow, tails below `_TAIL_FLOOR` are
        taken from a log-space accumulation of the log-density instead.
        """
        lower, upper = self.tail_probabilities(density)
        with np.errstate(divide="ignore"):
            log_lower, log_upper = np.log(lower), np.log(upper)
        if np.all(density.values > 0.0):
            return log_lower, log_upper
        log_p = density.log_density()
        if not np.all(np.isfinite(log_p)):
            raise ZeroDensityError("log-space tails need a finite log-density at every node")
        left = log_cumulative(log_p, density.dx)
        right = log_cumulative(log_p, density.dx, from_right=True)
        logger.debug("log-space tails used for %s", density.label)
        return (
            np.where(lower > _TAIL_FLOOR, log_lower, left - left[-1]),
            np.where(upper > _TAIL_FLOOR, log_upper, right - right[0]),
        )

    def _cell_fraction(self, density: GridDensity1D, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Cell index and the share of the cell mass lying left of x."""
        p = density.values
        h = density.dx
        idx = np.clip(np.floor((x - density.x_min) / h).astype(int), 0, density.n - 2)
        s = np.clip(x - (density.x_min + idx * h), 0.0, h)
        left, right = p[idx], p[idx + 1]
        partial = s * left + s * s * (right - left) / (2.0 * h)
        full = 0.5 * h * (left + right)
        with np.errstate(invalid="ignore", divide="ignore"):
            share = np.where(full > 0.0, partial / full, s / h)
        return idx, np.clip(share, 0.0, 1.0)

    def cdf(self, density: GridDensity1D, x) -> Union[float, np.ndarray]:
        """F(x): node values joined by the integral of the linearly interpolated density."""
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        lower, _ = self.tail_probabilities(density)
        idx, share = self._cell_fraction(density, arr)
        out = lower[idx] + (lower[idx + 1] - lower[idx]) * share
        out = np.where(arr <= density.x_min, 0.0, np.where(arr >= density.x_max, 1.0, out))
        return float(out[0]) if np.ndim(x) == 0 else out

    def survival(self, density: GridDensity1D, x) -> Union[float, np.ndarray]:
        """1 - F(x) accumulated from the right end."""
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        _, upper = self.tail_probabilities(density)
        idx, share = self._cell_fraction(density, arr)
        out = upper[idx] - (upper[idx] - upper[idx + 1]) * share
        out = np.where(arr <= density.x_min, 1.0, np.where(arr >= density.x_max, 0.0, out))
        return float(out[0]) if np.ndim(x) == 0 else out

    def interval_mass(self, density: GridDensity1D, a: float, b: float) -> float:
        """mu([a, b]) using whichever tail representation keeps precision."""
        if b < a:
            raise DomainError("interval must satisfy a <= b")
        a_eff = max(a, density.x_min)
        b_eff = min(b, density.x_max)
        if b_eff <= a_eff:
            return 0.0
        left = self.cdf(density, a_eff)
        if left > 0.5:
            return max(self.survival(density, a_eff) - self.survival(density, b_eff), 0.0)
        return max(self.cdf(density, b_eff) - left, 0.0)

    def _solve_share(self, density: GridDensity1D, idx: np.ndarray, share: np.ndarray) -> np.ndarray:
        """Invert the in-cell mass share back to a position."""
        p = density.values
        h = density.dx
        left, right = p[idx], p[idx + 1]
        partial = share * 0.5 * h * (left + right)
        slope = (right - left) / (2.0 * h)
        disc = np.sqrt(np.maximum(left * left + 4.0 * slope * partial, 0.0))
        with np.errstate(invalid="ignore", divide="ignore"):
            s = np.where(left + disc > 0.0, 2.0 * partial / (left + disc), share * h)
        return density.x_min + idx * h + np.clip(s, 0.0, h)

    def quantile(self, density: GridDensity1D, p) -> Union[float, np.ndarray]:
        """Inverse of cdf on (0, 1); the upper half is resolved through the survival function."""
        arr = np.atleast_1d(np.asarray(p, dtype=float))
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
            raise DomainError("p must lie in [0, 1]")
        if np.any((arr == 0.0) | (arr == 1.0)):
            raise UnboundedSupportError("quantile of 0 or 1 is the edge of the support")
        lower, upper = self.tail_probabilities(density)
        out = np.empty_like(arr)
        n_cells = density.n - 1

        lo = arr <= 0.5
        idx = np.clip(np.searchsorted(lower, arr[lo], side="right") - 1, 0, n_cells - 1)
        width = lower[idx + 1] - lower[idx]
        with np.errstate(invalid="ignore", divide="ignore"):
            share = np.where(width > 0.0, (arr[lo] - lower[idx]) / width, 0.0)
        out[lo] = self._solve_share(density, idx, np.clip(share, 0.0, 1.0))

        hi = ~lo
        out[hi] = self._upper_position(density, upper, 1.0 - arr[hi])
        return float(out[0]) if np.ndim(p) == 0 else out

    def _upper_position(self, density: GridDensity1D, upper: np.ndarray, q: np.ndarray) -> np.ndarray:
        # upper is nonincreasing; search on its reversal
        rev = upper[::-1]
        ridx = np.clip(np.searchsorted(rev, q, side="left"), 1, density.n - 1)
        idx = density.n - 1 - ridx
        width = upper[idx] - upper[idx + 1]
        with np.errstate(invalid="ignore", divide="ignore"):
            share = np.where(width > 0.0, (upper[idx] - q) / width, 0.0)
        return self._solve_share(density, idx, np.clip(share, 0.0, 1.0))

    def quantile_upper(self, density: GridDensity1D, q) -> Union[float, np.ndarray]:
        """Point x with S(x) = q for q in (0, 1); keeps precision deep in the right tail."""
        arr = np.atleast_1d(np.asarray(q, dtype=float))
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise UnboundedSupportError("upper-tail quantile needs q in (0, 1)")
        _, upper = self.tail_probabilities(density)
        out = self._upper_position(density, upper, arr)
        return float(out[0]) if np.ndim(q) == 0 else out

    # ------------------------------------------------------------------
    # Moments and entropy
    # ------------------------------------------------------------------
    def expectation(self, values, measure: Measure) -> float:
        """E f for f tabulated on the grid nodes or on the atoms."""
        f = np.asarray(values, dtype=float)
        if isinstance(measure, DiscreteMeasure):
            return float(measure.weights @ f)
        return integrate(f * measure.values, measure.dx)

    def mean(self, density: GridDensity1D) -> float:
        return self.expectation(density.grid, density)

    def entropy_Ent(self, f, measure: Measure) -> float:
        """Ent f = E(f log f) - (E f) log(E f), with 0 log 0 = 0."""
        f = np.asarray(f, dtype=float)
        if np.any(f < 0.0) or not np.all(np.isfinite(f)):
            raise DomainError("entropy needs a finite nonnegative function")
        mean_f = self.expectation(f, measure)
        if mean_f <= 0.0:
            return 0.0
        value = self.expectation(xlogy(f, f), measure) - mean_f * math.log(mean_f)
        return max(value, 0.0)

    # ------------------------------------------------------------------
    # Logarithmic gradient and divergence
    # ------------------------------------------------------------------
    def log_gradient(self, density: GridDensity1D) -> np.ndarray:
        """v_mu = p'/p by differences of log p."""
        log_p = density.log_density()
        if not np.all(np.isfinite(log_p)):
            raise ZeroDensityError("logarithmic gradient needs a strictly positive density")
        return np.gradient(log_p, density.dx, edge_order=2)

    def divergence_1d(self, K, density: GridDensity1D) -> np.ndarray:
        """delta_mu(K) = -K v_mu - K'."""
        K = np.asarray(K, dtype=float)
        if K.shape != (density.n,) or not np.all(np.isfinite(K)):
            raise DomainError("K must be finite and tabulated on the density grid")
        v_mu = self.log_gradient(density)
        return -K * v_mu - np.gradient(K, density.dx, edge_order=2)

    # ------------------------------------------------------------------
    # Windows, samples, image measures
    # ------------------------------------------------------------------
    def effective_window(self, density: GridDensity1D) -> slice:
        """
        Nodes away from truncated tails.

        An edge whose log-density sits more than `edge_log_margin` below the
        peak is treated as a cut-off tail, and the nodes within that margin
        of it are dropped. Other edges are real support boundaries and stay.
        """
        log_p = density.log_density()
        mode = int(np.argmax(log_p))
        top = log_p[mode]
        lo, hi = 0, density.n - 1
        margin = self.edge_log_margin
        if log_p[0] < top - margin:
            keep = np.nonzero(log_p[: mode + 1] >= log_p[0] + margin)[0]
            lo = int(keep[0])
        if log_p[-1] < top - margin:
            keep = np.nonzero(log_p[mode:] >= log_p[-1] + margin)[0]
            hi = mode + int(keep[-1])
        if lo != 0 or hi != density.n - 1:
            logger.debug("effective window of %s: [%.6g, %.6g]", density.label,
                         density.grid[lo], density.grid[hi])
        return slice(lo, hi + 1)

    def pushforward(self, density: GridDensity1D, v) -> DiscreteMeasure:
        """Image law mu o v^{-1} with one atom per grid node carrying its quadrature mass."""
        v = np.asarray(v, dtype=float)
        weights = density.values * density.dx
        weights[0] *= 0.5
        weights[-1] *= 0.5
        keep = weights > 0.0
        return DiscreteMeasure.from_points(v[keep], weights[keep])

    def sample(self, density: GridDensity1D, count: int, seed: int) -> np.ndarray:
        """Inverse-transform draws from the grid density."""
        if count < 1:
            raise DomainError("count must be positive")
        rng = np.random.default_rng(seed)
        u = rng.random(count)
        u = np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
        return np.asarray(self.quantile(density, u))

    def sample_pushforward(self, density: GridDensity1D, v, count: int, seed: int) -> DiscreteMeasure:
        """Empirical measure of v(X) for `count` draws X from the density."""
        draws = self.sample(density, count, seed)
        return DiscreteMeasure.from_points(np.interp(draws, density.grid, np.asarray(v, dtype=float)))
