"""
Time Integration for crawlgait

Proximal implicit-explicit scheme for v' in G(t, v):

    v' + dt * A(t + dt, v') contains v + dt * p(t + dt, v)

with A the increasing monotone part of -G (solved exactly on its
piecewise-linear slice) and p the load plus Lipschitz perturbations. The
time grid contains every breakpoint of the model signals and every time
two contact knots cross, and coefficients are sampled as left limits at
the end of each step, so a step never sees the next smooth piece of its
data. A step that passes a jump of G without sticking there is split at
the jump. When G is piecewise constant in v (pure dry friction) the step
is instead the exact flow among knots moving linearly across it.

All routines accept arrays of initial velocities and advance them together.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from crawlgait.core.dynamics import ReducedDynamics, TimeSlice
from crawlgait.core.friction import MonotoneSlice
from crawlgait.core.signals import Side
from crawlgait.utils.exceptions import ConfigError, InvalidStepError, NumericalError
from crawlgait.utils.logger import get_logger, log_once


logger = get_logger("crawlgait.solver")

MIN_STEPS_PER_PERIOD = 16
EXPLICIT_STABILITY = 0.5
GRID_MERGE_TOL = 1e-12

VelocityLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class SolverConfig:
    """Integrator settings"""
    steps_per_period: int = 4096
    resolvent_tol: float = 1e-12
    event_align: bool = True
    oracle_mode: bool = False
    stick_eps: float = 1e-9
    oracle_factor: int = 100

    def __post_init__(self):
        if not isinstance(self.steps_per_period, int) or self.steps_per_period < MIN_STEPS_PER_PERIOD:
            raise ConfigError(
                f"must be an integer >= {MIN_STEPS_PER_PERIOD}, got {self.steps_per_period!r}",
                "/solver/steps_per_period", "steps_per_period >= 16",
            )
        if not self.resolvent_tol > 0:
            raise ConfigError("must be positive", "/solver/resolvent_tol", "resolvent_tol > 0")
        if not self.stick_eps > 0:
            raise ConfigError("must be positive", "/solver/stick_eps", "stick_eps > 0")
        if not isinstance(self.oracle_factor, int) or self.oracle_factor < 1:
            raise ConfigError("must be a positive integer", "/solver/oracle_factor", "oracle_factor >= 1")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SolverConfig":
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        unknown = set(data) - set(known)
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(f"unknown solver option {key!r}", f"/solver/{key}", "known-fields")
        return cls(**known)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "steps_per_period": self.steps_per_period,
            "resolvent_tol": self.resolvent_tol,
            "event_align": self.event_align,
            "oracle_mode": self.oracle_mode,
            "stick_eps": self.stick_eps,
            "oracle_factor": self.oracle_factor,
        }


@dataclass
class Trajectory:
    """Sampled solution with barycentre displacement"""
    times: np.ndarray
    velocities: np.ndarray
    displacement: np.ndarray
    offsets: np.ndarray = field(repr=False)
    stick_eps: float = 1e-9

    @property
    def samples(self) -> List[Tuple[float, float]]:
        return list(zip(self.times.tolist(), self.velocities.tolist()))

    @property
    def stick_flags(self) -> List[Tuple[int, ...]]:
        """Contacts with |v + w_i(t)| < stick_eps at every sample"""
        sliding = np.abs(self.velocities[:, None] + self.offsets) < self.stick_eps
        return [tuple(np.nonzero(row)[0].tolist()) for row in sliding]

    @property
    def final_velocity(self) -> float:
        return float(self.velocities[-1])

    @property
    def final_displacement(self) -> float:
        return float(self.displacement[-1])

    def __len__(self) -> int:
        return self.times.size

    def velocity_at(self, t: np.ndarray) -> np.ndarray:
        return np.interp(t, self.times, self.velocities)


@dataclass
class SettleReport:
    """Outcome of iterating the period map until the periodic regime"""
    limit: float
    periods: int
    converged: bool
    finite_time: bool
    settle_time: Optional[float]
    iterates: List[float]


# ---------------------------------------------------------------------------
# Time grid
# ---------------------------------------------------------------------------

def effective_steps(dyn: ReducedDynamics, cfg: SolverConfig) -> int:
    """Steps per period, raised if the explicit part needs dt * L <= 0.5"""
    steps = cfg.steps_per_period
    if dyn.explicit_lipschitz > 0:
        needed = math.ceil(dyn.explicit_lipschitz * dyn.period / EXPLICIT_STABILITY)
        if needed > steps:
            log_once(logger, logging.WARNING, f"raise-steps-{dyn.period:g}-{dyn.explicit_lipschitz:g}-{steps}",
                     f"Raising steps_per_period from {steps} to {needed} for explicit stability")
            steps = needed
    return steps


def period_grid(dyn: ReducedDynamics, cfg: SolverConfig, factor: int = 1) -> np.ndarray:
    """Step endpoints over one period: uniform grid merged with the event times

    Events are the signal breakpoints and the times where two contact knots
    cross. Returns sorted times from 0 to T inclusive; events replace uniform
    points closer than GRID_MERGE_TOL * T.
    """
    T = dyn.period
    n = effective_steps(dyn, cfg) * factor
    uniform = T * np.arange(n + 1) / n
    bps = dyn.event_times if cfg.event_align else np.empty(0)
    if not bps.size:
        return uniform
    tol = GRID_MERGE_TOL * T
    keep = np.min(np.abs(uniform[:, None] - bps[None, :]), axis=1) > tol
    keep[0] = keep[-1] = True
    grid = np.unique(np.concatenate([uniform[keep], bps[(bps > tol) & (bps < T - tol)]]))
    grid[0], grid[-1] = 0.0, T
    return grid


def _time_points(dyn: ReducedDynamics, cfg: SolverConfig, t0: float, t1: float,
                 factor: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """Absolute step endpoints over [t0, t1] and their in-period times

    In-period times are taken in (0, T] so that left limits at a period
    boundary refer to the end of the period.
    """
    T = dyn.period
    local = period_grid(dyn, cfg, factor)
    first = math.floor(t0 / T)
    last = math.ceil(t1 / T)
    abs_parts = [np.asarray([t0])]
    s_parts = [np.asarray([dyn.reduce_time(t0, Side.LEFT)])]
    for p in range(first, last):
        base = p * T
        pts = base + local[1:]
        mask = (pts > t0) & (pts < t1)
        abs_parts.append(pts[mask])
        s_parts.append(local[1:][mask])
    abs_parts.append(np.asarray([t1]))
    s_parts.append(np.asarray([dyn.reduce_time(t1, Side.LEFT)]))
    times = np.concatenate(abs_parts)
    s = np.concatenate(s_parts)
    # t1 may coincide with a grid point up to rounding
    if times.size > 2 and times[-1] - times[-2] <= GRID_MERGE_TOL * T:
        times = np.delete(times, -2)
        s = np.delete(s, -2)
    return times, s


# ---------------------------------------------------------------------------
# Stepping
# ---------------------------------------------------------------------------

def _passed_jumps(mono: MonotoneSlice, v: np.ndarray, v_new: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Batch x knots mask of jumps without 0 in G lying between v and v_new (v_new included)"""
    x = mono.knots[None, :]
    lo = mono.lo[None, :] + p[:, None]
    hi = mono.hi[None, :] + p[:, None]
    passable = (hi > lo) & ((lo > 0) | (hi < 0))
    v0, v1 = v[:, None], v_new[:, None]
    between = np.where(v1 > v0, (x > v0) & (x <= v1), (x < v0) & (x >= v1))
    return passable & between


def _implicit_across(ts: TimeSlice, v: float, dt: float) -> float:
    """Proximal step split at the jumps of G it passes

    The proximal map lands on a jump knot k after tau = (k - v) / g, with g
    the one-sided value of G on the side of v; the rest of the step starts
    from k. Without the split the whole step would see the far-side value.
    """
    mono = ts.monotone
    for _ in range(mono.knots.size + 1):
        x = np.asarray([v])
        p = ts.explicit(x)
        r = float(mono.resolve(x + dt * p, dt)[0])
        hits = np.nonzero(_passed_jumps(mono, x, np.asarray([r]), p)[0])[0]
        if not hits.size:
            return r
        k = hits[0] if r > v else hits[-1]
        g = (mono.hi[k] if r > v else mono.lo[k]) + p[0]
        tau = (mono.knots[k] - v) / g
        if not 0.0 < tau < dt:
            return r
        v, dt = float(mono.knots[k]), dt - tau
    return v


def _dry_events(x0: np.ndarray, c: np.ndarray, lo: np.ndarray, hi: np.ndarray, region: np.ndarray,
                v: float, on: Optional[int], q: int, dt: float) -> float:
    """Event-by-event flow of one velocity among moving knots

    Knot j sits at x0[j] + c[j] * tau; region q lies between knots q - 1 and q
    and moves v with the constant value region[q].
    """
    n = x0.size
    tau = 0.0
    for _ in range(4 * n + 4):
        if on is not None:
            j = on
            if lo[j] <= c[j] <= hi[j]:
                return float(x0[j] + c[j] * dt)
            q = j if c[j] > hi[j] else j + 1
            on = None
        u = region[q]
        best, nxt = dt - tau, None
        if q < n and u > c[q]:
            t_meet = (x0[q] + c[q] * tau - v) / (u - c[q])
            if t_meet < best:
                best, nxt = t_meet, q
        if q > 0 and u < c[q - 1]:
            t_meet = (x0[q - 1] + c[q - 1] * tau - v) / (u - c[q - 1])
            if t_meet < best:
                best, nxt = t_meet, q - 1
        if nxt is None:
            return v + u * (dt - tau)
        tau += max(best, 0.0)
        v = float(x0[nxt] + c[nxt] * tau)
        on = nxt
    return v


def _dry_step(start: TimeSlice, end: TimeSlice, v: np.ndarray, dt: float) -> Optional[np.ndarray]:
    """Exact step when G is piecewise constant in v, None otherwise

    Knots move linearly from their start to their end positions and the
    values of G are those of the end slice. Velocities stick to a knot while
    its speed lies in G at the knot and leave it on the side the speed
    dictates otherwise. The grid keeps knots from crossing inside a step,
    so knot j at the start is knot j at the end.
    """
    mono = end.monotone
    if end.perturbation is not None or not mono.is_piecewise_constant:
        return None
    x0, x1 = start.monotone.knots, mono.knots
    if x0.size != x1.size or x1.size == 0:
        return None
    n = x1.size
    c = (x1 - x0) / dt
    lo, hi = mono.lo + end.load, mono.hi + end.load
    region = np.concatenate([hi[:1], lo])

    idx = np.searchsorted(x0, v, side="left")
    j = np.clip(idx, 0, n - 1)
    on = (idx < n) & (x0[j] == v)
    v_end = v + region[idx] * dt
    clear_below = (idx == 0) | (v_end > x1[np.clip(idx - 1, 0, n - 1)])
    clear_above = (idx == n) | (v_end < x1[j])
    free = ~on & clear_below & clear_above
    follow = on & (lo[j] <= c[j]) & (c[j] <= hi[j])

    out = np.where(free, v_end, x1[j])
    for i in np.nonzero(~(free | follow))[0]:
        out[i] = _dry_events(x0, c, lo, hi, region, float(v[i]),
                             int(j[i]) if on[i] else None, int(idx[i]), dt)
    return out


def _implicit_step(dyn: ReducedDynamics, s_now: float, s_next: float, v: np.ndarray,
                   dt: float) -> Tuple[np.ndarray, np.ndarray]:
    ts = dyn.slice_at(s_next, Side.LEFT)
    mono = ts.monotone
    if ts.perturbation is None and mono.is_piecewise_constant:
        v_new = _dry_step(dyn.slice_at(s_now, Side.RIGHT), ts, v, dt)
        if v_new is not None:
            return v_new, ts.offsets
    p = ts.explicit(v)
    v_new = mono.resolve(v + dt * p, dt)
    if np.any(mono.hi > mono.lo):
        crossed = np.any(_passed_jumps(mono, v, v_new, p), axis=1)
        for i in np.nonzero(crossed)[0]:
            v_new[i] = _implicit_across(ts, float(v[i]), dt)
    return v_new, ts.offsets


def _min_norm(ts: TimeSlice, v: np.ndarray) -> np.ndarray:
    lo, hi = ts.evaluate(v)
    return np.where(lo > 0, lo, np.where(hi < 0, hi, 0.0))


def _next_knot(knots: np.ndarray, v: np.ndarray, slope: np.ndarray) -> np.ndarray:
    """First knot strictly ahead of v in the direction of slope, nan if none"""
    n = knots.size
    idx_up = np.searchsorted(knots, v, side="right")
    idx_dn = np.searchsorted(knots, v, side="left") - 1
    up = np.where(idx_up < n, knots[np.clip(idx_up, 0, n - 1)], np.nan)
    dn = np.where(idx_dn >= 0, knots[np.clip(idx_dn, 0, n - 1)], np.nan)
    return np.where(slope > 0, up, np.where(slope < 0, dn, np.nan))


def _explicit_across(ts: TimeSlice, v: float, dt: float) -> float:
    knots = ts.monotone.knots
    for _ in range(knots.size + 1):
        x = np.asarray([v])
        slope = float(_min_norm(ts, x)[0])
        if slope == 0.0:
            return v
        target = v + dt * slope
        k = float(_next_knot(knots, x, np.asarray([slope]))[0])
        if math.isnan(k) or (target - k) * slope < 0:
            return target
        v, dt = k, dt - (k - v) / slope
        if dt <= 0.0:
            return v
    return v


def _oracle_step(dyn: ReducedDynamics, s_next: float, v: np.ndarray,
                 dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """Explicit Euler with the minimal-norm selection

    Coefficients are the left limits at the end of the step, as in the
    proximal scheme. A step stops at a knot with 0 in G and carries on past
    any other knot with the slope of the far side.
    """
    ts = dyn.slice_at(s_next, Side.LEFT)
    slope = _min_norm(ts, v)
    v_new = v + dt * slope
    ahead = _next_knot(ts.monotone.knots, v, slope)
    with np.errstate(invalid="ignore"):
        hit = ((slope > 0) & (ahead <= v_new)) | ((slope < 0) & (ahead >= v_new))
    for i in np.nonzero(hit)[0]:
        v_new[i] = _explicit_across(ts, float(v[i]), dt)
    return v_new, ts.offsets


def step(dyn: ReducedDynamics, t: float, v: VelocityLike, dt: float,
         cfg: Optional[SolverConfig] = None) -> VelocityLike:
    """One proximal step from (t, v) to t + dt

    Raises:
        InvalidStepError: dt <= 0 or dt * L_psi > 0.5
    """
    if not dt > 0:
        raise InvalidStepError(f"Step size must be positive, got {dt}")
    if dt * dyn.explicit_lipschitz > EXPLICIT_STABILITY:
        raise InvalidStepError(
            f"Step {dt:g} too large for the explicit part (L = {dyn.explicit_lipschitz:g})"
        )
    scalar = np.ndim(v) == 0
    s_now = dyn.reduce_time(t, Side.RIGHT)
    s_next = dyn.reduce_time(t + dt, Side.LEFT)
    v_new, _ = _implicit_step(dyn, s_now, s_next, np.atleast_1d(np.asarray(v, dtype=float)), dt)
    return float(v_new[0]) if scalar else v_new


def _march(
    dyn: ReducedDynamics,
    v0: np.ndarray,
    times: np.ndarray,
    s: np.ndarray,
    cfg: SolverConfig,
    record: bool,
    oracle: bool = False,
) -> Tuple[np.ndarray, Optional[np.ndarray], Optional[np.ndarray]]:
    """Advance a batch over the given endpoints

    Returns (final velocities, velocity history K x B, offsets history).
    """
    v = np.asarray(v0, dtype=float).copy()
    history = np.empty((times.size, v.size)) if record else None
    offsets = None
    if record:
        history[0] = v
        first = dyn.slice_at(dyn.reduce_time(times[0], Side.RIGHT), Side.RIGHT).offsets
        offsets = np.empty((times.size, first.size))
        offsets[0] = first

    for k in range(times.size - 1):
        dt = times[k + 1] - times[k]
        if oracle:
            v, off = _oracle_step(dyn, s[k + 1], v, dt)
        else:
            v, off = _implicit_step(dyn, dyn.reduce_time(times[k], Side.RIGHT), s[k + 1], v, dt)
        if record:
            history[k + 1] = v
            offsets[k + 1] = off
    if not np.all(np.isfinite(v)):
        raise NumericalError("Integration produced non-finite velocities", {"t": float(times[-1])})
    return v, history, offsets


def _trapezoid_displacement(times: np.ndarray, history: np.ndarray) -> np.ndarray:
    dt = np.diff(times)[:, None]
    increments = 0.5 * dt * (history[1:] + history[:-1])
    return np.vstack([np.zeros((1, history.shape[1])), np.cumsum(increments, axis=0)])


def _grid(dyn: ReducedDynamics, cfg: SolverConfig, t0: float, t1: float) -> Tuple[np.ndarray, np.ndarray, bool]:
    if cfg.oracle_mode:
        times, s = _time_points(dyn, cfg, t0, t1, factor=cfg.oracle_factor)
        return times, s, True
    times, s = _time_points(dyn, cfg, t0, t1)
    return times, s, False


def integrate_batch(
    dyn: ReducedDynamics,
    v0: Sequence[float],
    t0: float,
    t1: float,
    cfg: Optional[SolverConfig] = None,
) -> List[Trajectory]:
    """Integrate several initial velocities on a shared time grid"""
    cfg = cfg or SolverConfig()
    if not t1 > t0:
        raise InvalidStepError(f"Integration window must satisfy t1 > t0, got [{t0}, {t1}]")
    times, s, oracle = _grid(dyn, cfg, t0, t1)
    _, history, offsets = _march(dyn, np.atleast_1d(np.asarray(v0, dtype=float)), times, s, cfg,
                                 record=True, oracle=oracle)
    displacement = _trapezoid_displacement(times, history)
    return [
        Trajectory(times, history[:, j].copy(), displacement[:, j].copy(), offsets, cfg.stick_eps)
        for j in range(history.shape[1])
    ]


def integrate(
    dyn: ReducedDynamics,
    v0: float,
    t0: float,
    t1: float,
    cfg: Optional[SolverConfig] = None,
) -> Trajectory:
    """Trajectory from (t0, v0) to t1"""
    trajectory = integrate_batch(dyn, [v0], t0, t1, cfg)[0]
    logger.debug(f"Integrated [{t0:g}, {t1:g}] in {len(trajectory) - 1} steps, v(t1) = {trajectory.final_velocity:.12g}")
    return trajectory


def poincare(dyn: ReducedDynamics, v0: VelocityLike, cfg: Optional[SolverConfig] = None) -> VelocityLike:
    """Phi_T(v0): value at T of the solution from (0, v0); arrays map elementwise"""
    cfg = cfg or SolverConfig()
    scalar = np.ndim(v0) == 0
    times, s, oracle = _grid(dyn, cfg, 0.0, dyn.period)
    v, _, _ = _march(dyn, np.atleast_1d(np.asarray(v0, dtype=float)), times, s, cfg,
                     record=False, oracle=oracle)
    return float(v[0]) if scalar else v


def poincare_iterates(dyn: ReducedDynamics, v0: VelocityLike, k: int,
                      cfg: Optional[SolverConfig] = None) -> List[VelocityLike]:
    """[Phi_T(v0), ..., Phi_T^k(v0)] from one continuous integration"""
    if k < 1:
        raise InvalidStepError(f"Number of iterates must be at least 1, got {k}")
    cfg = cfg or SolverConfig()
    scalar = np.ndim(v0) == 0
    times, s, oracle = _grid(dyn, cfg, 0.0, dyn.period)
    v = np.atleast_1d(np.asarray(v0, dtype=float))
    iterates: List[VelocityLike] = []
    # The grid is the same every period
    for _ in range(k):
        v, _, _ = _march(dyn, v, times, s, cfg, record=False, oracle=oracle)
        iterates.append(float(v[0]) if scalar else v.copy())
    return iterates


def settle(
    dyn: ReducedDynamics,
    v0: float,
    cfg: Optional[SolverConfig] = None,
    tol: float = 1e-9,
    kmax: int = 200,
) -> SettleReport:
    """Iterate periods from v0 until |Phi_T(v) - v| < tol

    finite_time is set when the trajectory coincides with the limit orbit
    (to resolvent tolerance) before the final period; settle_time is the
    first time from which it does.
    """
    cfg = cfg or SolverConfig()
    times, s, oracle = _grid(dyn, cfg, 0.0, dyn.period)
    v = np.asarray([float(v0)])
    histories = []
    iterates = []
    converged = False
    for _ in range(kmax):
        v_prev = v
        v, history, _ = _march(dyn, v, times, s, cfg, record=True, oracle=oracle)
        histories.append(history[:, 0])
        iterates.append(float(v[0]))
        # Two periods at least, so the limit orbit has a predecessor to compare with
        if len(iterates) >= 2 and abs(v[0] - v_prev[0]) < tol:
            converged = True
            break

    limit_orbit = histories[-1]
    exact = cfg.resolvent_tol * 10.0 * (1.0 + np.abs(limit_orbit))
    settle_time = None
    finite_time = False
    if converged and len(histories) > 1:
        # Scan backwards for the last sample that differs from the limit orbit
        T = dyn.period
        for p in range(len(histories) - 2, -1, -1):
            diff = np.abs(histories[p] - limit_orbit) > exact
            if np.any(diff):
                last_bad = int(np.nonzero(diff)[0][-1])
                if last_bad + 1 < times.size:
                    settle_time = p * T + float(times[last_bad + 1])
                else:
                    settle_time = (p + 1) * T
                break
        else:
            settle_time = 0.0
        finite_time = settle_time is not None and settle_time < (len(histories) - 1) * dyn.period

    report = SettleReport(
        limit=iterates[-1],
        periods=len(iterates),
        converged=converged,
        finite_time=finite_time,
        settle_time=settle_time if finite_time else None,
        iterates=iterates,
    )
    logger.info(
        f"Settle from v0={v0:g}: limit={report.limit:.9g} after {report.periods} periods"
        + (f", attained at t*={report.settle_time:.6g}" if report.finite_time else "")
    )
    return report
