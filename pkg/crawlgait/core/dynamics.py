"""
Reduced Dynamics for crawlgait

The scalar right-hand side G(t, v) of the barycentre velocity inclusion,
built by the crawler models. At every time G splits into a decreasing
piecewise-linear part (implicit in the solver) and an explicit part made
of the load and the Lipschitz perturbations.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from crawlgait.core.friction import MonotoneSlice, ValueInterval
from crawlgait.core.signals import (
    BreakpointSet,
    DerivedSignal,
    Side,
    SignalBase,
    integrate_signal,
    l1_norm,
)
from crawlgait.utils.logger import get_logger


logger = get_logger("crawlgait.dynamics")

SLICE_CACHE_SIZE = 1 << 16
ZERO_GRID_POINTS = 10_000
CROSSING_SCAN_POINTS = 2048


class DynamicsFlag(str, Enum):
    """Structure of G used to pick the applicable uniqueness result"""
    NON_MONOTONE = "non-monotone"
    MONOTONE = "monotone"
    STRICTLY_MONOTONE = "strictly-monotone"
    SMOOTH_DRY = "smooth-dry"
    CONTINUOUS_DRY = "continuous-dry"

    @property
    def is_monotone(self) -> bool:
        return self != DynamicsFlag.NON_MONOTONE


@dataclass(frozen=True)
class TimeSlice:
    """G frozen at one time: implicit monotone part plus explicit part"""
    monotone: MonotoneSlice
    load: float
    offsets: np.ndarray
    envelope: Tuple[float, float]
    perturbation: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def explicit(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        p = np.full_like(v, self.load)
        if self.perturbation is not None:
            p = p + self.perturbation(v)
        return p

    def evaluate(self, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        lo, hi = self.monotone.evaluate(v)
        p = self.explicit(v)
        return lo + p, hi + p


@dataclass(frozen=True)
class VelocityBounds:
    """Dissipativity bounds and the absorbing velocity box"""
    R: float
    ell_minus: DerivedSignal
    ell_plus: DerivedSignal
    v_minus: float
    v_plus: float
    integral_plus: float
    integral_minus: float

    @property
    def passed(self) -> bool:
        return bool(self.integral_plus < 0 < self.integral_minus)


TailSums = Callable[[np.ndarray, Side], Tuple[np.ndarray, np.ndarray]]
KnotPaths = Callable[[float, Side], np.ndarray]


class ReducedDynamics:
    """Interval-valued G(t, v) with its monotone decomposition and bounds

    Immutable after construction; time slices are memoised per in-period
    time and side.
    """

    def __init__(
        self,
        period: float,
        mass: float,
        slice_builder: Callable[[float, Side], TimeSlice],
        flag: DynamicsFlag,
        breakpoints: BreakpointSet,
        load: SignalBase,
        tail_sums: TailSums,
        R: float,
        explicit_lipschitz: float = 0.0,
        kind: str = "discrete",
        reasons: Optional[List[str]] = None,
        contact_count: int = 0,
        knot_paths: Optional[KnotPaths] = None,
    ):
        self.period = float(period)
        self.mass = float(mass)
        self.flag = flag
        self.breakpoints = breakpoints
        self.load = load
        self.explicit_lipschitz = float(explicit_lipschitz)
        self.kind = kind
        self.reasons = list(reasons or [])
        self.contact_count = contact_count
        self._tail_sums = tail_sums
        self._knot_paths = knot_paths
        self._slice = lru_cache(maxsize=SLICE_CACHE_SIZE)(slice_builder)
        self.bounds = _compute_bounds(self, R)

    def reduce_time(self, t: float, side: Side = Side.RIGHT) -> float:
        """In-period time; the left limit at a period boundary is taken at T"""
        s = math.fmod(float(t), self.period)
        if s < 0:
            s += self.period
        if side == Side.LEFT and s == 0.0:
            s = self.period
        elif side == Side.RIGHT and s == self.period:
            s = 0.0
        return s

    def time_slice(self, t: float, side: Side = Side.RIGHT) -> TimeSlice:
        return self._slice(self.reduce_time(t, side), side)

    def slice_at(self, s: float, side: Side) -> TimeSlice:
        """Slice for an in-period time s already reduced by the caller"""
        return self._slice(s, side)

    def evaluate(self, t: float, v: np.ndarray, side: Side = Side.RIGHT) -> Tuple[np.ndarray, np.ndarray]:
        return self.time_slice(t, side).evaluate(np.asarray(v, dtype=float))

    def G(self, t: float, v: float) -> ValueInterval:
        """The set G(t, v) (right-continuous in t)"""
        lo, hi = self.evaluate(t, np.asarray([v], dtype=float))
        return ValueInterval(float(lo[0]), float(hi[0]))

    def v_breakpoints(self, t: float) -> np.ndarray:
        """Sorted velocities at which G(t, .) has a kink or a jump"""
        return self.time_slice(t).monotone.knots.copy()

    def tail_sums(self, tau: np.ndarray, side: Side = Side.RIGHT) -> Tuple[np.ndarray, np.ndarray]:
        return self._tail_sums(tau, side)

    @property
    def has_perturbation(self) -> bool:
        return self.explicit_lipschitz > 0.0

    @cached_property
    def knot_crossings(self) -> np.ndarray:
        """In-period times where two contact knots pass through each other"""
        if self._knot_paths is None:
            return np.empty(0)
        return _scan_crossings(self._knot_paths, self.period, self.breakpoints)

    @cached_property
    def event_times(self) -> np.ndarray:
        """Signal breakpoints and knot crossings, sorted, in [0, T)"""
        times = np.concatenate([np.asarray(self.breakpoints.times, dtype=float), self.knot_crossings])
        return np.unique(times)


def _scan_crossings(paths: KnotPaths, period: float, breakpoints: BreakpointSet,
                    samples: int = CROSSING_SCAN_POINTS) -> np.ndarray:
    """Sign changes of pairwise knot differences inside each smooth piece

    Jumps of the data sit on the breakpoints and are not crossings; inside a
    piece the paths are continuous and every sign change is refined with
    Brent's method.
    """
    edges = np.unique(np.concatenate([[0.0], np.asarray(breakpoints.times, dtype=float), [period]]))
    found: List[float] = []
    for a, b in zip(edges[:-1], edges[1:]):
        m = max(16, math.ceil(samples * (b - a) / period))
        s = np.linspace(a, b, m + 1)
        sides = [Side.RIGHT] * m + [Side.LEFT]
        knots = np.array([paths(float(si), side) for si, side in zip(s, sides)])
        if knots.ndim != 2 or knots.shape[1] < 2:
            return np.empty(0)
        for i in range(knots.shape[1]):
            for j in range(i + 1, knots.shape[1]):
                d = knots[:, i] - knots[:, j]
                if not np.any(d):
                    continue

                def gap(x, i=i, j=j, end=float(b)):
                    # Left limit at the end of the piece, as sampled
                    k = paths(x, Side.LEFT if x >= end else Side.RIGHT)
                    return float(k[i] - k[j])

                for l in np.nonzero(d[:-1] * d[1:] < 0)[0]:
                    found.append(brentq(gap, float(s[l]), float(s[l + 1]), xtol=1e-14 * period))
                # Touching zeros at interior samples with a sign change across
                inner = np.nonzero((d[1:-1] == 0) & (d[:-2] * d[2:] < 0))[0] + 1
                found.extend(float(s[l]) for l in inner)
    if not found:
        return np.empty(0)
    times = np.unique(np.asarray(found))
    return times[(times > 0.0) & (times < period)]


def _compute_bounds(dyn: ReducedDynamics, R: float) -> VelocityBounds:
    M = dyn.mass
    period = dyn.period
    bps = dyn.breakpoints

    def plus_sum(tau, side):
        return dyn.load.evaluate(tau, side) + dyn.tail_sums(tau, side)[1]

    def minus_sum(tau, side):
        return dyn.tail_sums(tau, side)[0] - dyn.load.evaluate(tau, side)

    ell_plus = DerivedSignal(period, lambda tau, side: plus_sum(tau, side) / M, bps)
    ell_minus = DerivedSignal(period, lambda tau, side: minus_sum(tau, side) / M, bps)

    integral_plus = M * integrate_signal(ell_plus, 0.0, period)
    integral_minus = -M * integrate_signal(ell_minus, 0.0, period)
    v_plus = R + l1_norm(ell_plus)
    v_minus = -(R + l1_norm(ell_minus))

    bounds = VelocityBounds(R, ell_minus, ell_plus, v_minus, v_plus, integral_plus, integral_minus)
    if not bounds.passed:
        logger.warning(
            f"Dissipativity check failed: I+ = {integral_plus:.6g}, I- = {integral_minus:.6g}"
        )
    return bounds


def velocity_bounds(dyn: ReducedDynamics) -> VelocityBounds:
    """R, ell_d-, ell_d+, v-, v+ together with the two dissipativity integrals"""
    return dyn.bounds


def contact_envelopes(dyn: ReducedDynamics, t: float) -> Tuple[float, float]:
    """(zeta-(t), zeta+(t)): min and max of the contact abscissae -w_i(t)"""
    return dyn.time_slice(t).envelope


def _snap_to_knots(value: float, knots: np.ndarray, tol: float = 1e-9) -> float:
    if knots.size == 0 or not math.isfinite(value):
        return value
    nearest = knots[np.argmin(np.abs(knots - value))]
    return float(nearest) if abs(nearest - value) <= tol * (1.0 + abs(value)) else value


def _bisect_predicate(pred: Callable[[float], bool], a: float, b: float, tol: float) -> float:
    """Boundary of a monotone predicate: pred(a) is False, pred(b) is True"""
    while b - a > tol * (1.0 + abs(a) + abs(b)):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if pred(mid):
            b = mid
        else:
            a = mid
    return b


def zero_set(
    dyn: ReducedDynamics,
    t: float,
    grid_n: int = ZERO_GRID_POINTS,
    tol: float = 1e-13,
    box: Optional[Tuple[float, float]] = None,
) -> List[ValueInterval]:
    """{v : 0 in G(t, v)} intersected with [v-, v+] (or with box when given)

    Monotone dynamics give at most one interval, found by bisection on the
    two monotone predicates. Non-monotone dynamics are scanned on a grid
    (plus the knots) and sign changes refined with Brent's method.
    """
    ts = dyn.time_slice(t)
    v_lo, v_hi = box if box is not None else (dyn.bounds.v_minus, dyn.bounds.v_plus)
    knots = ts.monotone.knots

    def lo_at(v: float) -> float:
        return float(ts.evaluate(np.asarray([v]))[0][0])

    def hi_at(v: float) -> float:
        return float(ts.evaluate(np.asarray([v]))[1][0])

    if dyn.flag.is_monotone:
        # a = inf{v : lo(G) <= 0}, b = sup{v : hi(G) >= 0}
        if lo_at(v_hi) > 0 or hi_at(v_lo) < 0:
            return []
        a = v_lo if lo_at(v_lo) <= 0 else _bisect_predicate(lambda v: lo_at(v) <= 0, v_lo, v_hi, tol)
        b = v_hi if hi_at(v_hi) >= 0 else -_bisect_predicate(lambda v: hi_at(-v) >= 0, -v_hi, -v_lo, tol)
        if a > b:
            # Both ends stop on the far side of a single root
            if a - b > 4.0 * tol * (1.0 + abs(a) + abs(b)):
                return []
            return [ValueInterval.point(_snap_to_knots(0.5 * (a + b), knots))]
        a, b = _snap_to_knots(a, knots), _snap_to_knots(b, knots)
        return [ValueInterval(min(a, b), b)]

    grid = np.unique(np.concatenate([
        np.linspace(v_lo, v_hi, grid_n),
        knots[(knots >= v_lo) & (knots <= v_hi)],
    ]))
    lo, hi = ts.evaluate(grid)
    contains = (lo <= 0) & (hi >= 0)
    mid = 0.5 * (lo + hi)

    def midpoint(v: float) -> float:
        lo_v, hi_v = ts.evaluate(np.asarray([v]))
        return float(0.5 * (lo_v[0] + hi_v[0]))

    intervals: List[ValueInterval] = []
    i = 0
    n = grid.size
    while i < n:
        if contains[i]:
            j = i
            while j + 1 < n and contains[j + 1]:
                j += 1
            intervals.append(ValueInterval(float(grid[i]), float(grid[j])))
            i = j + 1
            continue
        if i + 1 < n and not contains[i + 1] and mid[i] * mid[i + 1] < 0:
            root = brentq(midpoint, grid[i], grid[i + 1], xtol=tol)
            root = _snap_to_knots(root, knots)
            intervals.append(ValueInterval(root, root))
        i += 1
    return intervals
