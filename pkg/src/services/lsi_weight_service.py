import logging
import math
from typing import Literal, Optional

import numpy as np
from scipy.stats import kstest, kstwo

from ..config.settings import settings
from ..models.lsi import BakryEmeryResult, ImageLawResult, LsiConstants
from ..models.measure import GridDensity1D, WeightPair
from ..utils.exceptions import DomainError, ZeroDensityError
from ..utils.gauss_core import _phi_inv_unchecked, iso_I, log_iso_I
from ..utils.quadrature import cumulative, cumulative_from_right
from .measure_service import MeasureService

logger = logging.getLogger(__name__)

WeightKind = Literal["identity", "kbar", "khat"]


class LsiWeightService:
    """Log-Sobolev weights of one-dimensional densities and their constants."""

    def __init__(self, measure_service: Optional[MeasureService] = None, tol_fd: Optional[float] = None):
        self.measures = measure_service or MeasureService()
        self.tol_fd = tol_fd if tol_fd is not None else settings.tol_fd

    def _require_positive(self, density: GridDensity1D) -> None:
        if not np.all(np.isfinite(density.log_density())):
            raise ZeroDensityError("weight construction divides by the density; it must be positive")

    def _require_representable(self, density: GridDensity1D) -> None:
        self._require_positive(density)
        if not np.all(density.values > 0.0):
            raise ZeroDensityError("K_bar divides by density samples that underflow to zero; use khat")

    # ------------------------------------------------------------------
    # Weights
    # ------------------------------------------------------------------
    def kbar(self, density: GridDensity1D) -> np.ndarray:
        """
        (1/p(x)) * integral_x^inf (y - <mu>) p(y) dy.

        Right of the mean the tail integral is accumulated from the right
        end; left of it the centred identity -(1/p) integral_{-inf}^x is used,
        so neither side subtracts nearly equal numbers.
        """
        self._require_representable(density)
        x = density.grid
        centre = self.measures.mean(density)
        weighted = (x - centre) * density.values
        right = cumulative_from_right(weighted, density.dx)
        left = cumulative(weighted, density.dx)
        tail = np.where(x >= centre, right, -left)
        return np.maximum(tail / density.values, 0.0)

    def kbar_forward(self, density: GridDensity1D) -> np.ndarray:
        """-(1/p(x)) * integral_{-inf}^x (y - <mu>) p(y) dy on the whole grid."""
        self._require_representable(density)
        centre = self.measures.mean(density)
        weighted = (density.grid - centre) * density.values
        return -cumulative(weighted, density.dx) / density.values

    def khat(self, density: GridDensity1D) -> np.ndarray:
        """I(F(x)) / p(x), with the smaller tail fed to I and the ratio taken in log space."""
        self._require_positive(density)
        log_lower, log_upper = self.measures.log_tail_probabilities(density)
        log_q = np.minimum(np.where(log_lower <= math.log(0.5), log_lower, log_upper), math.log(0.5))
        return np.exp(np.asarray(log_iso_I(log_q)) - density.log_density())

    def gaussian_score(self, density: GridDensity1D) -> np.ndarray:
        """Phi_inv(F(x)) at the nodes, finite only where 0 < F < 1."""
        lower, upper = self.measures.tail_probabilities(density)
        return np.where(lower <= 0.5, _phi_inv_unchecked(lower), -_phi_inv_unchecked(upper))

    def weight(self, density: GridDensity1D, kind: WeightKind) -> np.ndarray:
        if kind == "identity":
            return np.ones(density.n)
        if kind == "kbar":
            return self.kbar(density)
        if kind == "khat":
            return self.khat(density)
        raise DomainError(f"unknown weight kind '{kind}'")

    def weight_pair(self, density: GridDensity1D, kind: WeightKind) -> WeightPair:
        """Weight and its mu-divergence."""
        K = self.weight(density, kind)
        return WeightPair(K=K, v=self.measures.divergence_1d(K, density), kind=kind)

    # ------------------------------------------------------------------
    # Constants
    # ------------------------------------------------------------------
    def _window_bounds(self, density: GridDensity1D, window: slice):
        grid = density.grid
        return float(grid[window.start]), float(grid[window.stop - 1])

    def lsi_constants(self, density: GridDensity1D, weight_kind: Literal["kbar", "khat"]) -> LsiConstants:
        """Inf and sup of the weight over the effective window and the resulting LSI constants."""
        if weight_kind not in ("kbar", "khat"):
            raise DomainError("weight_kind must be 'kbar' or 'khat'")
        window = self.measures.effective_window(density)
        K = self.weight(density, weight_kind)[window]
        alpha = float(np.min(K))
        beta = float(np.max(K))
        trending = int(np.argmin(K)) in (0, K.size - 1) or int(np.argmax(K)) in (0, K.size - 1)

        if weight_kind == "kbar":
            available = alpha > 0.0
            c_weighted = 1.0 / alpha if available else None
            c_classical = beta * beta / alpha if available else None
        else:
            available = True
            c_weighted = 1.0
            c_classical = beta * beta

        constants = LsiConstants(
            weight_kind=weight_kind,
            alpha=alpha,
            beta=beta,
            c_weighted=c_weighted,
            c_classical=c_classical,
            available=available,
            edge_trending=trending,
            window=self._window_bounds(density, window),
        )
        logger.info("%s constants for %s: alpha=%.6g beta=%.6g c=%s", weight_kind, density.label,
                    alpha, beta, c_classical)
        return constants

    def general_pair_constants(self, pair: WeightPair, density: GridDensity1D) -> LsiConstants:
        """Constants for an arbitrary pair: alpha = inf K v', weighted 1/alpha, classical sup K^2 / alpha."""
        window = self.measures.effective_window(density)
        slope = np.gradient(pair.v, density.dx, edge_order=2)
        curvature = (pair.K * slope)[window]
        alpha = float(np.min(curvature))
        beta = float(np.max(np.abs(pair.K[window])))
        available = alpha > 0.0
        return LsiConstants(
            weight_kind=pair.kind,
            alpha=alpha,
            beta=beta,
            c_weighted=1.0 / alpha if available else None,
            c_classical=beta * beta / alpha if available else None,
            available=available,
            window=self._window_bounds(density, window),
        )

    def iso_function_mu(self, density: GridDensity1D, p):
        """I_mu(p) = p_mu(F^{-1}(p))."""
        x = self.measures.quantile(density, p)
        values = np.interp(x, density.grid, density.values)
        return float(values) if np.ndim(p) == 0 else values

    def khat_ratio_sup(self, density: GridDensity1D) -> float:
        """sup over node probabilities of (I(p) / I_mu(p))^2, evaluated through the accurate tail."""
        window = self.measures.effective_window(density)
        lower, upper = self.measures.tail_probabilities(density)
        lower, upper = lower[window], upper[window]
        inside = (lower > 0.0) & (upper > 0.0)
        use_lower = inside & (lower <= 0.5)
        use_upper = inside & ~use_lower
        positions = np.empty(lower.shape)
        if np.any(use_lower):
            positions[use_lower] = self.measures.quantile(density, lower[use_lower])
        if np.any(use_upper):
            positions[use_upper] = self.measures.quantile_upper(density, upper[use_upper])
        iso_mu = np.interp(positions[inside], density.grid, density.values)
        iso_gauss = np.asarray(iso_I(np.where(use_lower, lower, upper)[inside]))
        return float(np.max((iso_gauss / iso_mu) ** 2))

    # ------------------------------------------------------------------
    # Bakry-Emery
    # ------------------------------------------------------------------
    def bakry_emery_check(self, pair: WeightPair, density: GridDensity1D) -> BakryEmeryResult:
        """
        Curvature condition K v' >= alpha and the Gamma_2 residual
        2ab' + 2bb'' - 4a'b - (b')^2 - 4 alpha b with a = 2KK' + K^2 v_mu, b = K^2.
        """
        window = self.measures.effective_window(density)
        interior = slice(window.start + 2, window.stop - 2)
        K, v = pair.K, pair.v
        if K.shape != (density.n,):
            raise DomainError("pair must live on the density grid")
        if np.any(K[interior] <= 0.0):
            raise DomainError("K must be strictly positive on the interior")

        h = density.dx

        def d(values):
            return np.gradient(values, h, edge_order=2)

        v_mu = self.measures.log_gradient(density)
        a = 2.0 * K * d(K) + K * K * v_mu
        b = K * K
        b1 = d(b)
        gamma2 = 2.0 * a * b1 + 2.0 * b * d(b1) - 4.0 * d(a) * b - b1 * b1

        alpha_max = float(np.min((K * d(v))[interior]))
        residual = (gamma2 - 4.0 * alpha_max * b)[interior]
        min_residual = float(np.min(residual))
        result = BakryEmeryResult(
            alpha_max=alpha_max,
            a_coeff=a[interior],
            gamma2_residual=residual,
            min_residual=min_residual,
            holds=min_residual >= -self.tol_fd,
            window=(float(density.grid[interior.start]), float(density.grid[interior.stop - 1])),
        )
        logger.info("Bakry-Emery: alpha_max=%.6g, min residual=%.3g", alpha_max, min_residual)
        return result

    # ------------------------------------------------------------------
    # Image law
    # ------------------------------------------------------------------
    def image_law_ks(self, density: GridDensity1D, samples: int, seed: int,
                     level: float = 0.01) -> ImageLawResult:
        """KS test of v(X) against N(0, 1) where v = delta_mu(K_hat) and X ~ mu."""
        pair = self.weight_pair(density, "khat")
        draws = self.measures.sample(density, samples, seed)
        images = np.interp(draws, density.grid, pair.v)
        result = kstest(images, "norm")
        critical = float(kstwo.ppf(1.0 - level, samples))
        return ImageLawResult(
            statistic=float(result.statistic),
            pvalue=float(result.pvalue),
            critical_value=critical,
            samples=samples,
            seed=seed,
            passes=float(result.statistic) < critical,
        )
