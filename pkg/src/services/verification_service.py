import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid

from ..config.settings import settings
from ..models.measure import GridDensity1D, WeightPair
from ..models.report import ConstantProfile, EntropyLimitResult, InequalityReport, TestBump
from ..utils.exceptions import DomainError, WindowOverflowError
from ..utils.gauss_core import iso_I, shift_semigroup
from .flow_service import FlowService
from .lsi_weight_service import LsiWeightService
from .measure_service import MeasureService

logger = logging.getLogger(__name__)

TestFunction = Union[TestBump, ConstantProfile]
Interval = Tuple[float, float]

DEFAULT_SHIFTS = (-1.0, -0.3, 0.3, 1.0)
DEFAULT_INTERVALS = 10
DEFAULT_EPS = (1e-2, 1e-4, 1e-8, 1e-16, 1e-32, 1e-64, 1e-128)


class VerificationService:
    """Checks each functional inequality on a family of test functions and reports the worst margin."""

    def __init__(self, measure_service: Optional[MeasureService] = None,
                 weight_service: Optional[LsiWeightService] = None,
                 flow_service: Optional[FlowService] = None,
                 tol_report: Optional[float] = None):
        self.measures = measure_service or MeasureService()
        self.weights = weight_service or LsiWeightService(self.measures)
        self.flows = flow_service or FlowService()
        self.tol_report = tol_report if tol_report is not None else settings.tol_report

    # ------------------------------------------------------------------
    # Test families
    # ------------------------------------------------------------------
    def bump_family(self, seed: int, count: int, support_window: Interval) -> List[TestBump]:
        """Seeded bumps with support inside the window."""
        if count < 1:
            raise DomainError("count must be at least 1")
        lo, hi = support_window
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
            raise DomainError("support window is empty")
        span = hi - lo
        rng = np.random.default_rng(seed)
        bumps = []
        for _ in range(count):
            width = rng.uniform(0.05 * span, 0.25 * span)
            center = rng.uniform(lo + width, hi - width)
            height = rng.uniform(0.1, 1.0)
            bumps.append(TestBump(center=center, width=width, height=height))
        return bumps

    def random_intervals(self, seed: int, count: int, window: Interval) -> List[Interval]:
        lo, hi = window
        if hi <= lo:
            raise DomainError("interval window is empty")
        rng = np.random.default_rng(seed)
        ends = np.sort(rng.uniform(lo, hi, size=(count, 2)), axis=1)
        return [(float(a), float(b)) for a, b in ends]

    def default_window(self, density: GridDensity1D) -> Interval:
        """Effective window with a fifth cut from each side."""
        window = self.measures.effective_window(density)
        lo = float(density.grid[window.start])
        hi = float(density.grid[window.stop - 1])
        trim = 0.2 * (hi - lo)
        return lo + trim, hi - trim

    def _identity(self, density: GridDensity1D, pair: Optional[WeightPair]) -> WeightPair:
        return pair if pair is not None else self.weights.weight_pair(density, "identity")

    def fit_shifts(self, density: GridDensity1D, pair: WeightPair, window: Interval,
                   h_list: Sequence[float]) -> Tuple[List[float], float]:
        """
        Scale the shifts so a flow of speed max|K| moves an endpoint at most a
        quarter of the window; returns the shifts and that largest displacement.
        """
        h_list = [float(h) for h in h_list]
        if not h_list:
            return h_list, 0.0
        lo, hi = window
        inside = (density.grid >= lo) & (density.grid <= hi)
        speed = float(np.max(np.abs(pair.K[inside]))) if np.any(inside) else 1.0
        travel = max(abs(h) for h in h_list) * speed
        limit = 0.25 * (hi - lo)
        if travel > limit:
            scale = limit / travel
            logger.info("shifts scaled by %.4g to fit the window of %s", scale, density.label)
            h_list = [scale * h for h in h_list]
            travel = limit
        return h_list, travel

    # ------------------------------------------------------------------
    # Reporting
    # ------------------------------------------------------------------
    def _quadrature_error(self, values: np.ndarray, density: GridDensity1D) -> float:
        """Size of the endpoint correction, an upper estimate of what the corrected rule misses."""
        weighted = values * density.values
        return abs(self.measures.expectation(values, density) - float(trapezoid(weighted, dx=density.dx)))

    def _report(self, name: str, margins: Sequence[float], witnesses: Sequence[dict],
                density: GridDensity1D, seed: Optional[int], error: float) -> InequalityReport:
        margins = np.asarray(margins, dtype=float)
        worst = int(np.argmin(margins))
        worst_margin = float(margins[worst])
        violated = worst_margin < -self.tol_report
        witness = dict(witnesses[worst], margin=worst_margin)
        report = InequalityReport(
            name=name,
            trials=int(margins.size),
            worst_margin=worst_margin,
            violated=violated,
            witness=witness,
            seed=seed,
            tolerances={"report": self.tol_report, "numerical_error": error},
            grid=density.grid_info(),
            inconclusive=error >= 0.1 * self.tol_report,
        )
        if violated:
            logger.warning("%s violated on %s: margin %.6g at %s", name, density.label, worst_margin, witness)
        else:
            logger.info("%s holds on %s over %d trials, worst margin %.6g", name, density.label,
                        report.trials, worst_margin)
        return report

    def _moments(self, density: GridDensity1D, pair: WeightPair, fn: TestFunction):
        f, df = fn.evaluate(density.grid)
        mean_f = self.measures.expectation(f, density)
        drift = self.measures.expectation(pair.K * df, density)
        error = max(self._quadrature_error(f, density), self._quadrature_error(pair.K * df, density))
        return f, df, mean_f, drift, error

    # ------------------------------------------------------------------
    # Isoperimetric-type inequalities
    # ------------------------------------------------------------------
    def functional_shift_check(self, density: GridDensity1D, pair: Optional[WeightPair], c: float,
                               bumps: Iterable[TestFunction], seed: Optional[int] = None) -> InequalityReport:
        """|E K f'| <= c I(E f)."""
        pair = self._identity(density, pair)
        margins, witnesses, error = [], [], 0.0
        for fn in bumps:
            _, _, mean_f, drift, err = self._moments(density, pair, fn)
            margins.append(c * iso_I(min(max(mean_f, 0.0), 1.0)) - abs(drift))
            witnesses.append(fn.describe())
            error = max(error, err)
        return self._report("functional_shift", margins, witnesses, density, seed, error)

    def iso_form_check(self, density: GridDensity1D, pair: Optional[WeightPair], c: float,
                       bumps: Iterable[TestFunction], seed: Optional[int] = None) -> InequalityReport:
        """sqrt((E I(f))^2 + (E K f')^2 / c^2) <= I(E f)."""
        pair = self._identity(density, pair)
        margins, witnesses, error = [], [], 0.0
        for fn in bumps:
            f, _, mean_f, drift, err = self._moments(density, pair, fn)
            iso_mean = self.measures.expectation(iso_I(f), density)
            lhs = math.hypot(iso_mean, drift / c)
            margins.append(iso_I(min(max(mean_f, 0.0), 1.0)) - lhs)
            witnesses.append(fn.describe())
            error = max(error, err)
        return self._report("iso_form", margins, witnesses, density, seed, error)

    def inverse_lsi_check(self, density: GridDensity1D, pair: Optional[WeightPair], c: float,
                          bumps_nonneg: Iterable[TestFunction], seed: Optional[int] = None) -> InequalityReport:
        """(E K f')^2 <= 2 c^2 Ent(f) E f."""
        pair = self._identity(density, pair)
        margins, witnesses, error = [], [], 0.0
        for fn in bumps_nonneg:
            f, _, mean_f, drift, err = self._moments(density, pair, fn)
            entropy = self.measures.entropy_Ent(f, density)
            margins.append(2.0 * c * c * entropy * mean_f - drift * drift)
            witnesses.append(fn.describe())
            error = max(error, err)
        return self._report("inverse_lsi", margins, witnesses, density, seed, error)

    # ------------------------------------------------------------------
    # Log-Sobolev and Poincare
    # ------------------------------------------------------------------
    def _energy(self, density: GridDensity1D, weight, df) -> Tuple[float, float]:
        grad = np.asarray(weight, dtype=float) * df
        return self.measures.expectation(grad * grad, density), self._quadrature_error(grad * grad, density)

    def lsi_check(self, density: GridDensity1D, weight, alpha: float,
                  test_fns: Iterable[TestFunction], seed: Optional[int] = None) -> InequalityReport:
        """Ent(f^2) <= (2/alpha) E (K f')^2."""
        if not alpha > 0.0:
            raise DomainError("alpha must be positive")
        margins, witnesses, error = [], [], 0.0
        for fn in test_fns:
            f, df = fn.evaluate(density.grid)
            energy, err = self._energy(density, weight, df)
            margins.append(2.0 / alpha * energy - self.measures.entropy_Ent(f * f, density))
            witnesses.append(fn.describe())
            error = max(error, err, self._quadrature_error(f * f, density))
        return self._report("lsi", margins, witnesses, density, seed, error)

    def poincare_check(self, density: GridDensity1D, weight, alpha: float,
                       test_fns: Iterable[TestFunction], seed: Optional[int] = None) -> InequalityReport:
        """Var f <= (1/alpha) E (K f')^2."""
        if not alpha > 0.0:
            raise DomainError("alpha must be positive")
        margins, witnesses, error = [], [], 0.0
        for fn in test_fns:
            f, df = fn.evaluate(density.grid)
            energy, err = self._energy(density, weight, df)
            mean_f = self.measures.expectation(f, density)
            variance = max(self.measures.expectation(f * f, density) - mean_f * mean_f, 0.0)
            margins.append(energy / alpha - variance)
            witnesses.append(fn.describe())
            error = max(error, err)
        return self._report("poincare", margins, witnesses, density, seed, error)

    # ------------------------------------------------------------------
    # Shifts
    # ------------------------------------------------------------------
    def _shift_margin(self, before: float, after: float, r: float) -> float:
        before = min(max(before, 0.0), 1.0)
        lower = shift_semigroup(before, r, "-")
        upper = shift_semigroup(before, r, "+")
        return min(after - lower, upper - after)

    def explicit_shift_check(self, density: GridDensity1D, pair: Optional[WeightPair], c: float,
                             h_list: Iterable[float], sets: Sequence[Interval],
                             seed: Optional[int] = None) -> InequalityReport:
        """S_{c|h|}(mu(A)) <= mu(Psi_1^{-1}(A)) <= R_{c|h|}(mu(A)) for intervals A."""
        pair = self._identity(density, pair)
        field = self.flows.field(pair, density)
        peak = float(np.max(density.values))
        margins, witnesses, error = [], [], 0.0
        for h in h_list:
            ends = np.array([end for interval in sets for end in interval], dtype=float)
            finite = np.isfinite(ends)
            mapped = ends.copy()
            if np.any(finite):
                flow = self.flows.flow_points(field, -h, 1.0, ends[finite])
                mapped[finite] = flow.grid_map
                error = max(error, flow.max_step_error_estimate * peak)
                escaped = (flow.grid_map < density.x_min) | (flow.grid_map > density.x_max)
                if np.any(escaped):
                    raise WindowOverflowError(
                        f"shift h={h} moves an interval endpoint outside [{density.x_min}, {density.x_max}]"
                    )
            for k, (a, b) in enumerate(sets):
                before = self.measures.interval_mass(density, a, b)
                after = self.measures.interval_mass(density, mapped[2 * k], mapped[2 * k + 1])
                margins.append(self._shift_margin(before, after, c * abs(h)))
                witnesses.append({"kind": "interval", "a": a, "b": b, "h": h})
        name = "explicit_shift" if pair.kind == "identity" else "flow_shift"
        return self._report(name, margins, witnesses, density, seed, error)

    def functional_flow_shift_check(self, density: GridDensity1D, pair: Optional[WeightPair], c: float,
                                    h_list: Iterable[float], bumps: Sequence[TestFunction],
                                    seed: Optional[int] = None) -> InequalityReport:
        """S_{c|h|}(E f) <= E f(Psi_1) <= R_{c|h|}(E f)."""
        pair = self._identity(density, pair)
        margins, witnesses, error = [], [], 0.0
        for h in h_list:
            flow = self.flows.flow_map(pair, density, h)
            for fn in bumps:
                f, _ = fn.evaluate(density.grid)
                moved, _ = fn.evaluate(flow.grid_map)
                before = self.measures.expectation(f, density)
                after = self.measures.expectation(moved, density)
                margins.append(self._shift_margin(before, after, c * abs(h)))
                witnesses.append(dict(fn.describe(), h=h))
                error = max(error, self._quadrature_error(moved, density))
            error = max(error, flow.max_step_error_estimate)
        return self._report("functional_flow_shift", margins, witnesses, density, seed, error)

    # ------------------------------------------------------------------
    # Small-eps limit
    # ------------------------------------------------------------------
    def _eps_quotients(self, density: GridDensity1D, f: np.ndarray, eps_list: Sequence[float]) -> List[float]:
        top = float(np.max(f))
        mean_f = self.measures.expectation(f, density)
        quotients = []
        for eps in eps_list:
            if not eps > 0.0 or eps * top >= 1.0:
                raise DomainError(f"eps={eps} must be positive with eps * max f < 1")
            head = iso_I(eps * mean_f) / eps
            body = self.measures.expectation(iso_I(eps * f), density) / eps
            quotients.append(head * head - body * body)
        return quotients

    def entropy_limit_check(self, density: GridDensity1D, f: TestFunction,
                            eps_list: Sequence[float] = DEFAULT_EPS) -> EntropyLimitResult:
        """[I^2(eps E f) - (E I(eps f))^2] / eps^2 against its limit 2 Ent(f) E f."""
        values, _ = f.evaluate(density.grid)
        quotients = self._eps_quotients(density, values, eps_list)
        target = 2.0 * self.measures.entropy_Ent(values, density) * self.measures.expectation(values, density)
        order = np.argsort(eps_list)
        ordered = np.asarray(quotients)[order]
        steps = np.diff(ordered)
        monotone = bool(np.all(steps >= 0.0) or np.all(steps <= 0.0))
        if not monotone:
            logger.info("entropy limit quotients are not monotone in eps on %s", density.label)
        return EntropyLimitResult(eps=list(eps_list), quotients=quotients, target=target, monotone=monotone)

    def iso_form_epsilon_check(self, density: GridDensity1D, pair: Optional[WeightPair], c: float,
                               f: TestFunction, eps_list: Sequence[float] = DEFAULT_EPS) -> InequalityReport:
        """The isoperimetric form applied to eps f, divided by eps^2."""
        pair = self._identity(density, pair)
        values, _, _, drift, error = self._moments(density, pair, f)
        quotients = self._eps_quotients(density, values, eps_list)
        margins = [q - drift * drift / (c * c) for q in quotients]
        witnesses = [dict(f.describe(), eps=eps) for eps in eps_list]
        return self._report("iso_form_epsilon", margins, witnesses, density, None, error)

    # ------------------------------------------------------------------
    # Suites
    # ------------------------------------------------------------------
    def gaussian_suite(self, density: GridDensity1D, pair: Optional[WeightPair] = None, c: float = 1.0,
                       seed: Optional[int] = None, trials: Optional[int] = None, alpha: float = 1.0,
                       h_list: Sequence[float] = DEFAULT_SHIFTS) -> List[InequalityReport]:
        """The five checks on one measure: functional shift, iso form, explicit shift, inverse LSI, LSI."""
        seed = seed if seed is not None else settings.default_seed
        trials = trials or settings.default_trials
        pair = self._identity(density, pair)
        window = self.default_window(density)
        bumps = self.bump_family(seed, trials, window)

        h_list, reach = self.fit_shifts(density, pair, window, h_list)
        intervals = self.random_intervals(seed, DEFAULT_INTERVALS, (window[0] + reach, window[1] - reach))
        return [
            self.functional_shift_check(density, pair, c, bumps, seed),
            self.iso_form_check(density, pair, c, bumps, seed),
            self.explicit_shift_check(density, pair, c, h_list, intervals, seed),
            self.inverse_lsi_check(density, pair, c, bumps, seed),
            self.lsi_check(density, pair.K, alpha, bumps, seed),
        ]
