import logging
import math
from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from ..config.settings import settings
from ..models.measure import DiscreteMeasure, GridDensity1D
from ..models.zonoid import LiftSupportQuery, MomentSearchResult, OrderCertificate
from ..utils.exceptions import DomainError, HeavyTailError
from ..utils.gauss_core import Phi, iso_I, phi
from ..utils.quadrature import integrate
from .measure_service import MeasureService

logger = logging.getLogger(__name__)

_EPS_CAP = 1e12
_BISECTION_STEPS = 100


class ZonoidService:
    """Support functions and section extrema of lift zonoids, and the order test against Gaussians."""

    def __init__(self, tol_order: Optional[float] = None, n_dirs: Optional[int] = None,
                 n_alphas: Optional[int] = None, direction_seed: Optional[int] = None,
                 eps_floor: Optional[float] = None):
        self.tol_order = tol_order if tol_order is not None else settings.tol_order
        self.n_dirs = n_dirs if n_dirs is not None else settings.n_dirs
        self.n_alphas = n_alphas if n_alphas is not None else settings.n_alphas
        self.direction_seed = direction_seed if direction_seed is not None else settings.direction_seed
        self.eps_floor = eps_floor if eps_floor is not None else settings.moment_eps_floor

    def _projections(self, nu: DiscreteMeasure, u) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if u.shape != (nu.d,):
            raise DomainError(f"direction has dimension {u.shape[0]}, measure has {nu.d}")
        return nu.atoms @ u

    # ------------------------------------------------------------------
    # Support functions
    # ------------------------------------------------------------------
    def lift_support_empirical(self, nu: DiscreteMeasure, q: LiftSupportQuery) -> float:
        """sum_i w_i (t + <x_i, u>)_+"""
        values = q.t + self._projections(nu, q.u)
        return float(nu.weights @ np.maximum(values, 0.0))

    def lift_support_gaussian(self, c: float, q: LiftSupportQuery) -> float:
        """E(t + c<Z, u>)_+ = c|u| (a Phi(a) + phi(a)) with a = t / (c|u|)."""
        if not c > 0.0:
            raise DomainError("c must be positive")
        scale = c * float(np.linalg.norm(q.u))
        if scale == 0.0:
            return max(q.t, 0.0)
        a = q.t / scale
        return scale * (a * Phi(a) + phi(a))

    def lift_zonoid_center(self, nu: DiscreteMeasure) -> Tuple[float, np.ndarray]:
        """Centre of symmetry (1/2, E x / 2)."""
        return 0.5, 0.5 * nu.mean()

    # ------------------------------------------------------------------
    # Sections
    # ------------------------------------------------------------------
    def section_profile(self, nu: DiscreteMeasure, u) -> Tuple[np.ndarray, np.ndarray]:
        """
        Breakpoints of alpha -> M(alpha, u).

        Atoms are taken greedily by decreasing projection, ties by index, so
        M is the piecewise-linear interpolant of (cumulative weight,
        cumulative weighted projection).
        """
        proj = self._projections(nu, u)
        order = np.lexsort((np.arange(nu.size), -proj))
        weights = nu.weights[order]
        alphas = np.concatenate(([0.0], np.cumsum(weights)))
        values = np.concatenate(([0.0], np.cumsum(weights * proj[order])))
        alphas[-1] = 1.0
        return alphas, values

    def section_extremum(self, nu: DiscreteMeasure, alpha, u) -> Union[float, np.ndarray]:
        """M(alpha, u) = sup{<E g x, u> : 0 <= g <= 1, E g = alpha}."""
        arr = np.asarray(alpha, dtype=float)
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise DomainError("alpha must lie in [0, 1]")
        alphas, values = self.section_profile(nu, u)
        result = np.interp(arr, alphas, values)
        return float(result) if np.ndim(alpha) == 0 else result

    def support_from_sections(self, nu: DiscreteMeasure, t: float, u) -> float:
        """Legendre dual: max over alpha of t*alpha + M(alpha, u), attained at a breakpoint."""
        alphas, values = self.section_profile(nu, u)
        return float(np.max(t * alphas + values))

    # ------------------------------------------------------------------
    # Order test
    # ------------------------------------------------------------------
    def directions(self, d: int, n_dirs: Optional[int] = None) -> np.ndarray:
        """+-1 in one dimension; scrambled Sobol points pushed to the sphere otherwise."""
        if d == 1:
            return np.array([[-1.0], [1.0]])
        n_dirs = n_dirs or self.n_dirs
        if n_dirs < 1:
            raise DomainError("n_dirs must be at least 1")
        sampler = qmc.Sobol(d=d, scramble=True, seed=self.direction_seed)
        points = sampler.random_base2(m=max(1, math.ceil(math.log2(n_dirs))))[:n_dirs]
        gaussian = ndtri(np.clip(points, 1e-12, 1.0 - 1e-12))
        gaussian /= np.linalg.norm(gaussian, axis=1, keepdims=True)
        axes = np.vstack([np.eye(d), -np.eye(d)])
        return np.vstack([axes, gaussian])

    def _alpha_grid(self, n_alphas: int) -> np.ndarray:
        if n_alphas < 2:
            raise DomainError("n_alphas must be at least 2")
        return np.linspace(0.0, 1.0, n_alphas + 2)[1:-1]

    def _centred(self, nu: DiscreteMeasure) -> DiscreteMeasure:
        """Translate nu to mean zero; the lift zonoid of gamma_c has a centred section at alpha = 1."""
        return DiscreteMeasure(atoms=nu.atoms - nu.mean(), weights=nu.weights)

    def _ratio_sweep(self, nu: DiscreteMeasure, n_dirs: int, n_alphas: int,
                     centre: bool = True) -> Tuple[float, float, np.ndarray]:
        """Largest M(alpha, u) / (I(alpha) |u|) over the sampled grid."""
        if centre:
            nu = self._centred(nu)
        alphas = self._alpha_grid(n_alphas)
        iso = np.asarray(iso_I(alphas))
        dirs = self.directions(nu.d, n_dirs)
        ratios = np.empty((dirs.shape[0], alphas.size))
        for k, u in enumerate(dirs):
            ratios[k] = np.asarray(self.section_extremum(nu, alphas, u)) / (iso * np.linalg.norm(u))
        flat = int(np.argmax(ratios))
        k, j = divmod(flat, alphas.size)
        return float(ratios[k, j]), float(alphas[j]), dirs[k]

    def order_check(self, nu: DiscreteMeasure, c: float, n_dirs: Optional[int] = None,
                    n_alphas: Optional[int] = None, centre: bool = True) -> OrderCertificate:
        """
        Test the inclusion of the lift zonoid of nu in that of gamma_c.

        With centre=True the atoms are first shifted by their weighted mean,
        so an empirical law of a mean-zero distribution is not rejected for
        its sampling mean alone. The removed offset is reported.
        """
        if not c > 0.0:
            raise DomainError("c must be positive")
        n_dirs = n_dirs or self.n_dirs
        n_alphas = n_alphas or self.n_alphas
        ratio, alpha, u = self._ratio_sweep(nu, n_dirs, n_alphas, centre)
        worst = ratio / c
        certificate = OrderCertificate(
            c=c,
            dominated=worst <= 1.0 + self.tol_order,
            worst_ratio=worst,
            witness_alpha=alpha,
            witness_direction=[float(x) for x in u],
            n_dirs=n_dirs,
            n_alphas=n_alphas,
            sampled_directions=nu.d > 1,
            mean_offset=[float(x) for x in nu.mean()] if centre else None,
        )
        logger.info("order check c=%g: worst ratio %.6g (%s)", c, worst,
                    "dominated" if certificate.dominated else "not dominated")
        return certificate

    def minimal_dominating_c(self, nu: Union[DiscreteMeasure, GridDensity1D], n_dirs: Optional[int] = None,
                             n_alphas: Optional[int] = None, v=None, centre: bool = True) -> float:
        """
        Smallest c for which every sampled (alpha, u) passes the order test.

        A grid density is first pushed forward by v, its log-gradient by default.
        """
        if isinstance(nu, GridDensity1D):
            measures = MeasureService()
            v = measures.log_gradient(nu) if v is None else v
            nu = measures.pushforward(nu, v)
        ratio, _, _ = self._ratio_sweep(nu, n_dirs or self.n_dirs, n_alphas or self.n_alphas, centre)
        return max(ratio, 0.0)

    # ------------------------------------------------------------------
    # Square-exponential moments
    # ------------------------------------------------------------------
    def _moment_function(self, measure: Union[DiscreteMeasure, GridDensity1D], v=None):
        if isinstance(measure, GridDensity1D):
            values = measure.grid if v is None else np.asarray(v, dtype=float)
            squares = values * values

            def moment(eps: float) -> float:
                with np.errstate(over="ignore"):
                    return integrate(np.exp(eps * squares) * measure.values, measure.dx)
            return moment

        dirs = self.directions(measure.d)
        squares = (measure.atoms @ dirs.T) ** 2

        def moment(eps: float) -> float:
            with np.errstate(over="ignore"):
                return float(np.max(measure.weights @ np.exp(eps * squares)))
        return moment

    def eps_moment_search(self, measure: Union[DiscreteMeasure, GridDensity1D], v=None) -> MomentSearchResult:
        """
        Largest eps with sup_h E exp(eps <v, h>^2) <= 2, by bisection.

        The bracket (1/sqrt(6 eps), 4/sqrt(eps)) contains every c for which
        the law of v is lift-zonoid dominated by gamma_c and vice versa.
        """
        moment = self._moment_function(measure, v)
        lo = self.eps_floor
        if moment(lo) > 2.0:
            raise HeavyTailError(f"no eps >= {lo:g} keeps the square-exponential moment below 2")
        hi = 1.0
        while moment(hi) <= 2.0:
            lo = hi
            hi *= 2.0
            if hi > _EPS_CAP:
                logger.warning("square-exponential moment stays below 2 up to eps=%g", _EPS_CAP)
                return MomentSearchResult(eps=lo, c_lower=1.0 / math.sqrt(6.0 * lo),
                                          c_upper=4.0 / math.sqrt(lo), moment=moment(lo))
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if moment(mid) <= 2.0:
                lo = mid
            else:
                hi = mid
        return MomentSearchResult(
            eps=lo,
            c_lower=1.0 / math.sqrt(6.0 * lo),
            c_upper=4.0 / math.sqrt(lo),
            moment=moment(lo),
        )
