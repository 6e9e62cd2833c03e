"""
Asymptotic Analysis for crawlgait

Attractor bracket [alpha, beta] of the period map, fixed points with their
stability classes, limit cycles with the geometric phase, order statistics
of the contact abscissae, dissipativity and structural classification.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from crawlgait.core.dynamics import DynamicsFlag, ReducedDynamics, zero_set
from crawlgait.core.signals import (
    PeriodicSignal,
    Side,
    mean_over_period,
)
from crawlgait.core.solver import (
    SolverConfig,
    Trajectory,
    integrate,
    integrate_batch,
    poincare,
)
from crawlgait.utils.exceptions import DissipativityError, NotPeriodicError, NumericalError
from crawlgait.utils.logger import get_logger


logger = get_logger("crawlgait.analysis")

MONOTONE_SLACK = 1e-9
MULTISECTION_POINTS = 15
ADVISORY_WIDENINGS = 8


class Stability(str, Enum):
    """Stability of a fixed point of the period map, from the sign of Phi(v) - v"""
    STABLE = "stable"
    SEMISTABLE_LEFT = "semistable-left"
    SEMISTABLE_RIGHT = "semistable-right"
    UNSTABLE = "unstable"
    DEGENERATE = "degenerate"

    @classmethod
    def from_signs(cls, left: float, right: float) -> "Stability":
        # A neighbour with Phi(v) = v is not a side that attracts or repels
        if left == 0 or right == 0 or not np.isfinite([left, right]).all():
            return cls.DEGENERATE
        if left > 0 and right < 0:
            return cls.STABLE
        if left < 0 and right > 0:
            return cls.UNSTABLE
        if left > 0 and right > 0:
            return cls.SEMISTABLE_LEFT
        return cls.SEMISTABLE_RIGHT


class Theorem(str, Enum):
    """Which asymptotic result applies to the dynamics"""
    GENERIC = "generic-attractor"
    MONOTONE = "monotone-translation"
    STRICT = "strict-uniqueness"
    SMOOTH_DRY = "smooth-dry-uniqueness"
    CONTINUOUS_DRY = "continuous-dry-uniqueness"


_THEOREM_BY_FLAG = {
    DynamicsFlag.NON_MONOTONE: Theorem.GENERIC,
    DynamicsFlag.MONOTONE: Theorem.MONOTONE,
    DynamicsFlag.STRICTLY_MONOTONE: Theorem.STRICT,
    DynamicsFlag.SMOOTH_DRY: Theorem.SMOOTH_DRY,
    DynamicsFlag.CONTINUOUS_DRY: Theorem.CONTINUOUS_DRY,
}


@dataclass
class AttractorReport:
    """K = [alpha, beta], the limit of the period-map images of [v-, v+]"""
    alpha: float
    beta: float
    iterates_lo: List[float]
    iterates_hi: List[float]
    converged: bool
    iterations: int

    @property
    def bracket_width(self) -> float:
        return self.beta - self.alpha

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "converged": self.converged,
            "iterations": self.iterations,
            "bracket_width": self.bracket_width,
        }


@dataclass
class FixedPoint:
    v: float
    stability: Stability

    def to_dict(self) -> Dict[str, Any]:
        return {"v": self.v, "class": self.stability.value}


@dataclass
class FixedPointReport:
    """Isolated fixed points and plateaus (continua) of the period map"""
    points: List[FixedPoint]
    plateaus: List[Tuple[float, float]]
    grid_resolution: float
    tol: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "fixed_points": [p.to_dict() for p in self.points],
            "plateaus": [[a, b] for a, b in self.plateaus],
            "grid_resolution": self.grid_resolution,
        }


@dataclass
class LimitCycle:
    """One-period orbit from a fixed point and its geometric phase"""
    v_star: float
    orbit: Trajectory
    gamma: float
    average_velocity: float
    residual: float


@dataclass
class GammaDiagnostics:
    """Order statistics Gamma_j(t) of the contact abscissae -w_i(t)"""
    times: np.ndarray
    gammas: np.ndarray
    min_gaps: List[float]
    gap_times: List[float]
    continuity: List[bool]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "min_gaps": self.min_gaps,
            "gap_times": self.gap_times,
            "continuity": self.continuity,
            "grid_points": int(self.times.size),
        }


@dataclass
class DissipativityReport:
    passed: bool
    integral_plus: float
    integral_minus: float

    def to_dict(self) -> Dict[str, Any]:
        return {"pass": self.passed, "I_plus": self.integral_plus, "I_minus": self.integral_minus}


@dataclass
class Classification:
    """Applicable result and whether a unique periodic solution is predicted"""
    theorem: Theorem
    uniqueness_predicted: bool
    flag: DynamicsFlag
    reasons: List[str] = field(default_factory=list)
    unique_zero: Optional[bool] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theorem": self.theorem.value,
            "uniqueness_predicted": self.uniqueness_predicted,
            "flag": self.flag.value,
            "reasons": list(self.reasons),
            "unique_zero_advisory": self.unique_zero,
        }


# ---------------------------------------------------------------------------
# Dissipativity and classification
# ---------------------------------------------------------------------------

def dissipativity_check(dyn: ReducedDynamics) -> DissipativityReport:
    """Pass iff int (B + sum ell+) < 0 < int (B - sum ell-)"""
    bounds = dyn.bounds
    return DissipativityReport(bounds.passed, bounds.integral_plus, bounds.integral_minus)


def _unique_zero_advisory(dyn: ReducedDynamics, samples: int) -> bool:
    """G single-valued with one zero at every sampled time (not a certificate)"""
    centre = 0.5 * (dyn.bounds.v_minus + dyn.bounds.v_plus)
    for t in np.linspace(0.0, dyn.period, samples, endpoint=False):
        zeros = zero_set(dyn, float(t))
        # The zero may sit outside the absorbing box at some times
        half = 0.5 * (dyn.bounds.v_plus - dyn.bounds.v_minus)
        for _ in range(ADVISORY_WIDENINGS):
            if zeros:
                break
            half *= 4.0
            zeros = zero_set(dyn, float(t), box=(centre - half, centre + half))
        if len(zeros) != 1 or zeros[0].width > 1e-9:
            return False
        v = zeros[0].lo
        g = dyn.G(float(t), v)
        if not g.is_point:
            return False
    return True


def classify_dynamics(dyn: ReducedDynamics, advisory_samples: int = 16) -> Classification:
    """Structural class of G and the uniqueness prediction it carries"""
    theorem = _THEOREM_BY_FLAG[dyn.flag]
    uniqueness = dyn.flag in (
        DynamicsFlag.STRICTLY_MONOTONE,
        DynamicsFlag.SMOOTH_DRY,
        DynamicsFlag.CONTINUOUS_DRY,
    )
    reasons = list(dyn.reasons)
    unique_zero = None
    if dyn.flag.is_monotone and dyn.bounds.passed:
        unique_zero = _unique_zero_advisory(dyn, advisory_samples)
        if unique_zero:
            reasons.append("advisory: G is single-valued with a single zero at every sampled time")
    if not dyn.bounds.passed:
        reasons.append("dissipativity check failed: the attractor is not certified")
    return Classification(theorem, uniqueness, dyn.flag, reasons, unique_zero)


# ---------------------------------------------------------------------------
# Attractor and fixed points
# ---------------------------------------------------------------------------

def attractor_bracket(
    dyn: ReducedDynamics,
    cfg: Optional[SolverConfig] = None,
    tol: float = 1e-6,
    kmax: int = 10_000,
) -> AttractorReport:
    """Iterate the period map from v- and v+ until both sequences settle

    Raises:
        DissipativityError: the bounds are not certified
        NumericalError: an iterate sequence loses monotonicity
    """
    cfg = cfg or SolverConfig()
    bounds = dyn.bounds
    if not bounds.passed:
        raise DissipativityError(
            "Load overcomes friction: no absorbing interval",
            bounds.integral_plus, bounds.integral_minus,
        )

    v = np.array([bounds.v_minus, bounds.v_plus])
    iterates_lo, iterates_hi = [float(v[0])], [float(v[1])]
    converged = False
    iterations = 0
    for iterations in range(1, kmax + 1):
        v_next = np.asarray(poincare(dyn, v, cfg))
        if v_next[0] < v[0] - MONOTONE_SLACK or v_next[1] > v[1] + MONOTONE_SLACK:
            raise NumericalError(
                "Period-map iterates from the velocity bounds are not monotone",
                {"iteration": iterations, "previous": v.tolist(), "next": v_next.tolist()},
            )
        iterates_lo.append(float(v_next[0]))
        iterates_hi.append(float(v_next[1]))
        done = np.all(np.abs(v_next - v) < tol)
        v = v_next
        logger.debug(f"Bracket iteration {iterations}: [{v[0]:.12g}, {v[1]:.12g}]")
        if done:
            converged = True
            break

    report = AttractorReport(
        alpha=float(v[0]),
        beta=float(v[1]),
        iterates_lo=iterates_lo,
        iterates_hi=iterates_hi,
        converged=converged,
        iterations=iterations,
    )
    if not converged:
        logger.warning(f"Attractor bracket did not converge in {kmax} iterations")
    logger.info(f"Attractor bracket [{report.alpha:.9g}, {report.beta:.9g}] after {iterations} iterations")
    return report


def _displacement_map(dyn: ReducedDynamics, cfg: SolverConfig) -> Callable[[np.ndarray], np.ndarray]:
    def g(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return np.asarray(poincare(dyn, v, cfg)) - v
    return g


def _multisection(
    g: Callable[[np.ndarray], np.ndarray],
    a: np.ndarray,
    b: np.ndarray,
    like_a: Callable[[np.ndarray, int], np.ndarray],
    width: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """Shrink brackets [a, b] around the first point where like_a turns False

    like_a(values, j) classifies g-values for bracket j; all brackets are
    refined together with one batched period-map evaluation per round.
    """
    a = np.asarray(a, dtype=float).copy()
    b = np.asarray(b, dtype=float).copy()
    if a.size == 0:
        return a, b
    fractions = np.linspace(0.0, 1.0, MULTISECTION_POINTS + 2)[1:-1]
    while np.max(b - a) > width:
        points = a[:, None] + (b - a)[:, None] * fractions[None, :]
        values = g(points.ravel()).reshape(points.shape)
        for j in range(a.size):
            flags = like_a(values[j], j)
            if np.all(flags):
                a[j] = points[j, -1]
                continue
            first = int(np.argmax(~flags))
            if first > 0:
                a[j] = points[j, first - 1]
            b[j] = points[j, first]
    return a, b


def fixed_points(
    dyn: ReducedDynamics,
    report: AttractorReport,
    grid_n: int = 512,
    tol: float = 1e-6,
    cfg: Optional[SolverConfig] = None,
) -> FixedPointReport:
    """Fixed points of the period map on [alpha, beta] and their classes

    g(v) = Phi_T(v) - v is sampled on a grid; runs with |g| < tol form
    plateaus (or points when a single sample), sign changes are refined by
    multisection, and classes follow the sign of g on both sides.

    Raises:
        NumericalError: the attractor bracket did not converge
    """
    if not report.converged:
        raise NumericalError(
            "Fixed-point scan needs a converged attractor bracket",
            {"iterations": report.iterations, "bracket_width": report.bracket_width},
        )
    cfg = cfg or SolverConfig()
    alpha, beta = report.alpha, report.beta
    h = max((beta - alpha) / max(grid_n - 1, 1), 4.0 * tol)
    # A bracket narrower than tol holds a single fixed point
    inner = np.linspace(alpha, beta, grid_n) if beta - alpha > tol else np.asarray([0.5 * (alpha + beta)])
    grid = np.concatenate([[alpha - h], inner, [beta + h]])
    g = _displacement_map(dyn, cfg)
    values = g(grid)
    zero = np.abs(values) < tol

    def side_value(v: float) -> float:
        return float(g(np.asarray([v]))[0])

    points: List[FixedPoint] = []
    plateaus: List[Tuple[float, float]] = []
    n = grid.size

    # Plateau boundaries and sign changes are refined in two batches
    edge_left, edge_right, edge_kind, edge_signs = [], [], [], []
    signs_left, signs_right = [], []
    i = 0
    while i < n:
        if zero[i]:
            j = i
            while j + 1 < n and zero[j + 1]:
                j += 1
            left = values[i - 1] if i > 0 else side_value(grid[0] - h)
            right = values[j + 1] if j + 1 < n else side_value(grid[-1] + h)
            if i == j:
                points.append(FixedPoint(float(grid[i]), Stability.from_signs(left, right)))
            else:
                lo_a = grid[i - 1] if i > 0 else grid[0] - h
                hi_b = grid[j + 1] if j + 1 < n else grid[-1] + h
                edge_left.append((lo_a, grid[i]))
                edge_right.append((grid[j], hi_b))
                edge_signs.append((left, right))
            i = j + 1
            continue
        if i + 1 < n and not zero[i + 1] and values[i] * values[i + 1] < 0:
            edge_kind.append((grid[i], grid[i + 1]))
            signs_left.append(values[i])
            signs_right.append(values[i + 1])
        i += 1

    if edge_left:
        # Left edge: first sample with |g| < tol
        a, b = _multisection(g, np.array([e[0] for e in edge_left]), np.array([e[1] for e in edge_left]),
                             lambda vals, j: np.abs(vals) >= tol, tol)
        lefts = b
        # Right edge: last sample with |g| < tol
        a2, b2 = _multisection(g, np.array([e[0] for e in edge_right]), np.array([e[1] for e in edge_right]),
                               lambda vals, j: np.abs(vals) < tol, tol)
        rights = a2
        for l, r, (left, right) in zip(lefts, rights, edge_signs):
            if r - l <= 2.0 * tol:
                # Too narrow to tell from an isolated point at this tolerance
                points.append(FixedPoint(float(0.5 * (l + r)), Stability.from_signs(left, right)))
            else:
                plateaus.append((float(l), float(r)))

    if edge_kind:
        sl = np.asarray(signs_left)
        a, b = _multisection(
            g, np.array([e[0] for e in edge_kind]), np.array([e[1] for e in edge_kind]),
            lambda vals, j: (np.sign(vals) == np.sign(sl[j])) & (np.abs(vals) >= tol), tol,
        )
        for k in range(a.size):
            points.append(FixedPoint(float(0.5 * (a[k] + b[k])),
                                     Stability.from_signs(signs_left[k], signs_right[k])))

    points.sort(key=lambda p: p.v)
    plateaus.sort()
    logger.info(f"Fixed points: {len(points)} isolated, {len(plateaus)} plateaus (resolution {h:.3g})")
    return FixedPointReport(points, plateaus, h, tol)


# ---------------------------------------------------------------------------
# Limit cycles
# ---------------------------------------------------------------------------

def limit_cycle(
    dyn: ReducedDynamics,
    v_star: float,
    cfg: Optional[SolverConfig] = None,
    periodicity_tol: float = 1e-6,
) -> LimitCycle:
    """One-period orbit from a fixed point, with gamma = displacement over T

    Raises:
        NotPeriodicError: |Phi_T(v_star) - v_star| > periodicity_tol
    """
    orbit = integrate(dyn, v_star, 0.0, dyn.period, cfg)
    residual = abs(orbit.final_velocity - v_star)
    if residual > periodicity_tol:
        raise NotPeriodicError(
            f"v0 = {v_star:.9g} is not a fixed point of the period map "
            f"(|Phi(v0) - v0| = {residual:.3g} > {periodicity_tol:g})",
            residual,
        )
    gamma = orbit.final_displacement
    return LimitCycle(v_star, orbit, gamma, gamma / dyn.period, residual)


def translation_defect(
    dyn: ReducedDynamics,
    a: float,
    b: float,
    cfg: Optional[SolverConfig] = None,
) -> float:
    """max over one period of |(v_b - v_a)(t) - (b - a)|

    Zero when the periodic orbits through a and b differ by a constant.
    """
    orbit_a, orbit_b = integrate_batch(dyn, [a, b], 0.0, dyn.period, cfg)
    return float(np.max(np.abs((orbit_b.velocities - orbit_a.velocities) - (b - a))))


# ---------------------------------------------------------------------------
# Order statistics
# ---------------------------------------------------------------------------

def gamma_order_stats(w: Sequence[PeriodicSignal], grid_n: int = 10_000) -> GammaDiagnostics:
    """Gamma_j(t) = j-th smallest of {-w_1(t), ..., -w_n(t)} on a period grid"""
    if not w:
        raise ValueError("gamma_order_stats needs at least one signal")
    period = max(s.period for s in w)
    for i, s in enumerate(w):
        mean = mean_over_period(s)
        if abs(mean) > 1e-8:
            logger.warning(f"w_{i + 1} has non-zero mean {mean:.3g}; gap estimates assume zero mean")

    grid = np.linspace(0.0, period, grid_n, endpoint=False)
    extra = [np.asarray(s.breakpoint_set().times) for s in w]
    times = np.unique(np.concatenate([grid] + extra))
    # Both one-sided limits at the breakpoints
    values = np.vstack([-np.asarray(s.evaluate(times, Side.RIGHT)) for s in w])
    left_values = np.vstack([-np.asarray(s.evaluate(times, Side.LEFT)) for s in w])
    gammas = np.sort(values, axis=0)
    gammas_left = np.sort(left_values, axis=0)

    min_gaps, gap_times = [], []
    for j in range(len(w) - 1):
        gaps = np.minimum(gammas[j + 1] - gammas[j], gammas_left[j + 1] - gammas_left[j])
        k = int(np.argmin(gaps))
        min_gaps.append(float(gaps[k]))
        gap_times.append(float(times[k]))
    continuity = [s.breakpoint_set().is_continuous for s in w]
    return GammaDiagnostics(times, gammas, min_gaps, gap_times, continuity)


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

def report_to_json(
    attractor: Optional[AttractorReport] = None,
    fixed: Optional[FixedPointReport] = None,
    cycle: Optional[LimitCycle] = None,
    classification: Optional[Classification] = None,
    dissipativity: Optional[DissipativityReport] = None,
    extra: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """Assemble the report.json document; absent analyses are null"""
    report: Dict[str, Any] = {
        "alpha": attractor.alpha if attractor else None,
        "beta": attractor.beta if attractor else None,
        "fixed_points": [p.to_dict() for p in fixed.points] if fixed else [],
        "plateaus": [[a, b] for a, b in fixed.plateaus] if fixed else [],
        "gamma": cycle.gamma if cycle else None,
        "avg_velocity": cycle.average_velocity if cycle else None,
        "theorem": classification.theorem.value if classification else None,
        "dissipativity": dissipativity.to_dict() if dissipativity else None,
    }
    if extra:
        report.update(extra)
    return report
