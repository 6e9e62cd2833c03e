"""
Friction Laws for crawlgait

A friction law is stored in split form

    F(t, u) = -mu_v(t) * u - dry(t, u) - extra(u) + psi(t, u)

where dry(t, u) is {mu+} for u > 0, {-mu-} for u < 0 and [-mu-, mu+] at
u = 0, extra is a time-constant nondecreasing piecewise-linear graph and
psi is a bounded Lipschitz perturbation (e.g. a Stribeck dip). Without psi
the law is a maximal monotone decreasing graph in u.

At a frozen time the monotone part is piecewise linear in u, so its
resolvent is computed exactly by inverting a piecewise-linear graph.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from crawlgait.core.signals import (
    PeriodicSignal,
    Side,
    constant_signal,
    sample_grid,
    sampled_min,
    signal_from_spec,
)
from crawlgait.utils.exceptions import InvalidStepError, LawError, NumericalError, SignalError


class LawClass(str, Enum):
    """Structural class of a friction law"""
    DRY_ONLY = "dry-only"
    MONOTONE = "monotone"
    STRICTLY_MONOTONE = "strictly-monotone"
    NON_MONOTONE = "non-monotone"


LAW_TYPES = ("dry", "viscous", "bingham", "stribeck", "custom")


@dataclass(frozen=True)
class ValueInterval:
    """Closed interval [lo, hi] of admissible values"""
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"Empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value: float) -> "ValueInterval":
        return cls(value, value)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= value <= self.hi + tol

    def __add__(self, other: "ValueInterval") -> "ValueInterval":
        return ValueInterval(self.lo + other.lo, self.hi + other.hi)

    def scale(self, factor: float) -> "ValueInterval":
        a, b = self.lo * factor, self.hi * factor
        return ValueInterval(min(a, b), max(a, b))

    def shift(self, offset: float) -> "ValueInterval":
        return ValueInterval(self.lo + offset, self.hi + offset)


# ---------------------------------------------------------------------------
# Monotone building blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonotoneGraph:
    """Nondecreasing piecewise-linear graph y(u), constant in time

    Repeated abscissae describe vertical segments (set-valued points).
    Outside the knots the graph continues with the given outer slopes.
    """
    knots_u: Tuple[float, ...]
    knots_y: Tuple[float, ...]
    slope_left: float = 0.0
    slope_right: float = 0.0

    def __post_init__(self):
        u = np.asarray(self.knots_u, dtype=float)
        y = np.asarray(self.knots_y, dtype=float)
        if u.ndim != 1 or u.size == 0 or u.shape != y.shape:
            raise LawError("Monotone graph needs matching non-empty knot lists")
        if np.any(np.diff(u) < 0) or np.any(np.diff(y) < 0):
            raise LawError("Monotone graph knots must be nondecreasing in u and y")
        if self.slope_left < 0 or self.slope_right < 0:
            raise LawError("Monotone graph outer slopes must be non-negative")

    @property
    def is_strict(self) -> bool:
        u = np.asarray(self.knots_u)
        y = np.asarray(self.knots_y)
        du, dy = np.diff(u), np.diff(y)
        return bool(self.slope_left > 0 and self.slope_right > 0 and np.all(dy[du > 0] > 0))

    def evaluate(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Return (lo, hi) of the graph at every u"""
        u = np.asarray(u, dtype=float)
        ku = np.asarray(self.knots_u)
        ky = np.asarray(self.knots_y)
        n = ku.size
        i_left = np.searchsorted(ku, u, side="left")
        i_right = np.searchsorted(ku, u, side="right")

        k = i_right - 1
        inner = (k >= 0) & (k < n - 1)
        kc = np.clip(k, 0, max(n - 2, 0))
        if n > 1:
            du = ku[kc + 1] - ku[kc]
            frac = np.where(du > 0, (u - ku[kc]) / np.where(du > 0, du, 1.0), 0.0)
            mid = ky[kc] + frac * (ky[kc + 1] - ky[kc])
        else:
            mid = np.full_like(u, ky[0])
        hi = np.where(k < 0, ky[0] + self.slope_left * (u - ku[0]),
                      np.where(inner, mid, ky[-1] + self.slope_right * (u - ku[-1])))
        on_knot = i_left < i_right
        lo = np.where(on_knot, ky[np.clip(i_left, 0, n - 1)], hi)
        hi = np.where(on_knot, ky[np.clip(i_right - 1, 0, n - 1)], hi)
        return lo, hi

    def to_spec(self) -> Dict[str, Any]:
        return {
            "u": list(self.knots_u),
            "y": list(self.knots_y),
            "slope_left": self.slope_left,
            "slope_right": self.slope_right,
        }


class Perturbation:
    """Bounded single-valued perturbation psi(t, u), Lipschitz in u"""

    lipschitz: float
    bound: float

    def evaluate(self, t: float, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def tail_sup(self, u_min: float) -> float:
        """Upper bound of psi(t, u) over u >= u_min"""
        return self.bound

    def tail_inf(self, u_min: float) -> float:
        """Lower bound of psi(t, u) over u <= -u_min"""
        return -self.bound

    def to_spec(self) -> Dict[str, Any]:
        raise LawError(f"{type(self).__name__} cannot be serialized")


@dataclass(frozen=True)
class StribeckPerturbation(Perturbation):
    """psi(u) = amplitude * sin(pi * u / width) for |u| < width, else 0"""
    amplitude: float
    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise LawError(f"Stribeck width must be positive, got {self.width}")

    @property
    def lipschitz(self) -> float:
        return abs(self.amplitude) * math.pi / self.width

    @property
    def bound(self) -> float:
        return abs(self.amplitude)

    def evaluate(self, t, u):
        u = np.asarray(u, dtype=float)
        inside = np.abs(u) < self.width
        return np.where(inside, self.amplitude * np.sin(math.pi * u / self.width), 0.0)

    def tail_sup(self, u_min):
        if u_min >= self.width or self.amplitude <= 0:
            return 0.0
        if u_min <= self.width / 2:
            return self.amplitude
        # Decreasing branch of the bump
        return self.amplitude * math.sin(math.pi * u_min / self.width)

    def tail_inf(self, u_min):
        # psi is odd
        return -self.tail_sup(u_min)

    def to_spec(self):
        return {"amplitude": self.amplitude, "width": self.width}


@dataclass(frozen=True)
class CallablePerturbation(Perturbation):
    """Programmatic psi(t, u) with declared Lipschitz constant and bound"""
    fn: Callable[[float, np.ndarray], np.ndarray] = field(compare=False)
    lipschitz: float = 0.0
    bound: float = 0.0

    def evaluate(self, t, u):
        return np.asarray(self.fn(t, np.asarray(u, dtype=float)), dtype=float)


@dataclass(frozen=True)
class TailBounds:
    """Declared one-sided bounds: F >= -ell_minus for u <= -R, F <= ell_plus for u >= R"""
    ell_minus: PeriodicSignal
    ell_plus: PeriodicSignal
    threshold: float

    def to_spec(self) -> Dict[str, Any]:
        return {
            "minus": self.ell_minus.to_spec(),
            "plus": self.ell_plus.to_spec(),
            "R": self.threshold,
        }


# ---------------------------------------------------------------------------
# Friction law
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrictionLaw:
    """Time-periodic set-valued friction law in split form"""
    viscous_coeff: PeriodicSignal
    dry_plus: PeriodicSignal
    dry_minus: PeriodicSignal
    extra_monotone: Optional[MonotoneGraph] = None
    perturbation: Optional[Perturbation] = None
    declared_tail_bounds: Optional[TailBounds] = None
    kind: str = "custom"

    def __post_init__(self):
        periods = {round(s.period, 12) for s in self.signals()}
        if len(periods) > 1:
            raise LawError(f"Law coefficients have inconsistent periods: {sorted(periods)}")
        for name, s in (("mu_v", self.viscous_coeff), ("mu_plus", self.dry_plus),
                        ("mu_minus", self.dry_minus)):
            if sampled_min(s, 512) < -1e-12:
                raise LawError(f"Coefficient {name} must be non-negative")
        if self.perturbation is not None and not math.isfinite(self.perturbation.lipschitz):
            raise LawError("Perturbation needs a finite declared Lipschitz constant")

    @property
    def period(self) -> float:
        return self.viscous_coeff.period

    def signals(self) -> List[PeriodicSignal]:
        result = [self.viscous_coeff, self.dry_plus, self.dry_minus]
        if self.declared_tail_bounds is not None:
            result += [self.declared_tail_bounds.ell_minus, self.declared_tail_bounds.ell_plus]
        return result

    @property
    def has_perturbation(self) -> bool:
        return self.perturbation is not None

    def coefficients(self, t: float, side: Side = Side.RIGHT) -> Tuple[float, float, float]:
        """(mu_v, mu+, mu-) at time t"""
        return (
            float(self.viscous_coeff.evaluate(t, side)),
            float(self.dry_plus.evaluate(t, side)),
            float(self.dry_minus.evaluate(t, side)),
        )

    def to_spec(self) -> Dict[str, Any]:
        spec: Dict[str, Any] = {
            "type": self.kind,
            "mu_v": self.viscous_coeff.to_spec(),
            "mu_plus": self.dry_plus.to_spec(),
            "mu_minus": self.dry_minus.to_spec(),
        }
        if self.extra_monotone is not None:
            spec["extra"] = self.extra_monotone.to_spec()
        if self.perturbation is not None:
            spec["psi"] = self.perturbation.to_spec()
        if self.declared_tail_bounds is not None:
            spec["tail_bounds"] = self.declared_tail_bounds.to_spec()
        return spec


def monotone_part(
    mu_v: np.ndarray,
    mu_plus: np.ndarray,
    mu_minus: np.ndarray,
    u: np.ndarray,
    extra: Optional[MonotoneGraph] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """(lo, hi) of -mu_v*u - dry(u) - extra(u); arguments broadcast"""
    positive = u > 0
    negative = u < 0
    # -dry(u): -mu+ for u > 0, mu- for u < 0, [-mu+, mu-] at 0
    dry_lo = np.where(negative, mu_minus, -mu_plus)
    dry_hi = np.where(positive, -mu_plus, mu_minus)
    lo = -mu_v * u + dry_lo
    hi = -mu_v * u + dry_hi
    if extra is not None:
        e_lo, e_hi = extra.evaluate(u)
        lo = lo - e_hi
        hi = hi - e_lo
    return lo, hi


def eval_law(law: FrictionLaw, t: float, u: float, side: Side = Side.RIGHT) -> ValueInterval:
    """The set F(t, u)"""
    mu_v, mu_p, mu_m = law.coefficients(t, side)
    lo, hi = monotone_part(mu_v, mu_p, mu_m, np.asarray([u], dtype=float), law.extra_monotone)
    lo_v, hi_v = float(lo[0]), float(hi[0])
    if law.perturbation is not None:
        psi = float(law.perturbation.evaluate(t, np.asarray([u]))[0])
        lo_v, hi_v = lo_v + psi, hi_v + psi
    return ValueInterval(lo_v, hi_v)


# ---------------------------------------------------------------------------
# Piecewise-linear slices and the resolvent
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonotoneSlice:
    """Decreasing piecewise-linear graph in v at a frozen time

    The graph takes the interval [lo[k], hi[k]] at knots[k] and is linear
    from (knots[k], lo[k]) to (knots[k+1], hi[k+1]) in between; outside the
    knots it continues with slope_left / slope_right (both <= 0).
    """
    knots: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    slope_left: float
    slope_right: float

    @cached_property
    def is_piecewise_constant(self) -> bool:
        """Flat between and outside the knots (pure dry friction)"""
        if self.slope_left != 0.0 or self.slope_right != 0.0:
            return False
        scale = 1.0 + float(np.max(np.abs(self.hi), initial=0.0)) + float(np.max(np.abs(self.lo), initial=0.0))
        return bool(np.all(np.abs(self.lo[:-1] - self.hi[1:]) <= 1e-12 * scale))

    def evaluate(self, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        v = np.asarray(v, dtype=float)
        x, lo_k, hi_k = self.knots, self.lo, self.hi
        n = x.size
        k = np.searchsorted(x, v, side="right") - 1
        kc = np.clip(k, 0, n - 1)
        on_knot = (k >= 0) & (x[kc] == v)
        if n > 1:
            kn = np.clip(k, 0, n - 2)
            frac = (v - x[kn]) / (x[kn + 1] - x[kn])
            between = lo_k[kn] + frac * (hi_k[kn + 1] - lo_k[kn])
        else:
            between = np.zeros_like(v)
        value = np.where(
            k < 0, hi_k[0] + self.slope_left * (v - x[0]),
            np.where(k >= n - 1, lo_k[-1] + self.slope_right * (v - x[-1]), between),
        )
        lo = np.where(on_knot, lo_k[kc], value)
        hi = np.where(on_knot, hi_k[kc], value)
        return lo, hi

    def resolve(self, rhs: np.ndarray, step: float) -> np.ndarray:
        """Unique v' with rhs in v' - step * graph(v')

        v' - step*graph(v') is increasing with slope >= 1; it is inverted
        exactly, so stiction lands on the knots.
        """
        rhs = np.asarray(rhs, dtype=float)
        x = self.knots
        g_lo = x - step * self.hi
        g_hi = x - step * self.lo
        yp = np.column_stack([g_lo, g_hi]).ravel()
        xp = np.repeat(x, 2)
        result = np.interp(rhs, yp, xp)
        below = rhs < yp[0]
        above = rhs > yp[-1]
        if np.any(below):
            result = np.where(below, x[0] + (rhs - yp[0]) / (1.0 - step * self.slope_left), result)
        if np.any(above):
            result = np.where(above, x[-1] + (rhs - yp[-1]) / (1.0 - step * self.slope_right), result)
        if not np.all(np.isfinite(result)):
            raise NumericalError(
                "Resolvent produced a non-finite value",
                {"step": step, "rhs": rhs.tolist() if rhs.ndim else float(rhs)},
            )
        return result


def assemble_slice(
    knots: np.ndarray,
    evaluate: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
    slope_left: float,
    slope_right: float,
) -> MonotoneSlice:
    """Build a slice from candidate knots and an exact (lo, hi) evaluator"""
    knots = np.unique(np.asarray(knots, dtype=float))
    if knots.size == 0:
        knots = np.zeros(1)
    lo, hi = evaluate(knots)
    return MonotoneSlice(knots, np.asarray(lo, dtype=float), np.asarray(hi, dtype=float),
                         float(slope_left), float(slope_right))


def law_slice(law: FrictionLaw, t: float, shift: float = 0.0,
              side: Side = Side.RIGHT, weight: float = 1.0) -> MonotoneSlice:
    """Monotone part of weight * F(t, v + shift) as a slice in v"""
    mu_v, mu_p, mu_m = law.coefficients(t, side)
    knots = [-shift]
    slope_left = slope_right = -mu_v
    if law.extra_monotone is not None:
        knots.extend(np.asarray(law.extra_monotone.knots_u) - shift)
        slope_left -= law.extra_monotone.slope_left
        slope_right -= law.extra_monotone.slope_right

    def evaluate(v):
        lo, hi = monotone_part(mu_v, mu_p, mu_m, v + shift, law.extra_monotone)
        return weight * lo, weight * hi

    return assemble_slice(np.asarray(knots), evaluate, weight * slope_left, weight * slope_right)


def resolvent_monotone(
    law: FrictionLaw,
    t: float,
    step: float,
    rhs: float,
) -> float:
    """Resolvent (I + step*A)^-1 of A = -(monotone part of F(t, .)) at rhs

    The slice is piecewise linear, so the map v -> v + step*A(v) is inverted
    in closed form by interpolation instead of bisection. The result agrees
    with the exact resolvent to rounding, well inside the 1e-12 relative
    resolvent_tol; stiction returns the knot itself.

    Raises:
        InvalidStepError: step <= 0
    """
    if not step > 0:
        raise InvalidStepError(f"Resolvent step must be positive, got {step}")
    return float(law_slice(law, t).resolve(np.asarray([rhs]), step)[0])


# ---------------------------------------------------------------------------
# Classification and tails
# ---------------------------------------------------------------------------

def classify_law(law: FrictionLaw) -> LawClass:
    """dry-only / monotone / strictly-monotone / non-monotone"""
    if law.perturbation is not None:
        return LawClass.NON_MONOTONE
    if sampled_min(law.viscous_coeff, 512) > 0 or (
        law.extra_monotone is not None and law.extra_monotone.is_strict
    ):
        return LawClass.STRICTLY_MONOTONE
    viscous_grid = sample_grid(law.viscous_coeff, 512)
    no_viscous = not np.any(law.viscous_coeff.evaluate(viscous_grid) != 0.0)
    if no_viscous and law.extra_monotone is None:
        return LawClass.DRY_ONLY
    return LawClass.MONOTONE


def tail_bounds(
    law: FrictionLaw,
    t: np.ndarray,
    u_min: float,
    side: Side = Side.RIGHT,
) -> Tuple[np.ndarray, np.ndarray]:
    """One-sided tails (ell_minus(t), ell_plus(t)) of the law

    F(t, u) <= ell_plus(t) for u >= u_min and F(t, u) >= -ell_minus(t) for
    u <= -u_min. Declared bounds take precedence and require u_min >= R_law.
    """
    t = np.asarray(t, dtype=float)
    if law.declared_tail_bounds is not None:
        tails = law.declared_tail_bounds
        if u_min < tails.threshold:
            raise LawError(
                f"Declared tail bounds hold for |u| >= {tails.threshold}, asked for {u_min}"
            )
        return tails.ell_minus.evaluate(t, side), tails.ell_plus.evaluate(t, side)

    mu_v = law.viscous_coeff.evaluate(t, side)
    mu_p = law.dry_plus.evaluate(t, side)
    mu_m = law.dry_minus.evaluate(t, side)
    ell_plus = -mu_p - mu_v * u_min
    ell_minus = -mu_m - mu_v * u_min
    if law.extra_monotone is not None:
        lo_right, _ = law.extra_monotone.evaluate(np.asarray([u_min]))
        _, hi_left = law.extra_monotone.evaluate(np.asarray([-u_min]))
        ell_plus = ell_plus - float(lo_right[0])
        ell_minus = ell_minus + float(hi_left[0])
    if law.perturbation is not None:
        ell_plus = ell_plus + law.perturbation.tail_sup(u_min)
        ell_minus = ell_minus - law.perturbation.tail_inf(u_min)
    return ell_minus, ell_plus


# ---------------------------------------------------------------------------
# JSON specification
# ---------------------------------------------------------------------------

def _signal_field(
    spec: Dict[str, Any],
    names: Sequence[str],
    period: float,
    bindings: Optional[Dict[str, float]],
    default: Optional[float] = 0.0,
) -> PeriodicSignal:
    for name in names:
        if name in spec:
            try:
                return signal_from_spec(spec[name], period, bindings)
            except SignalError as e:
                raise LawError(f"{name}: {e}") from e
    if default is None:
        raise LawError(f"Missing field {names[0]!r}")
    return constant_signal(default, period)


def law_from_spec(
    spec: Dict[str, Any],
    period: float,
    bindings: Optional[Dict[str, float]] = None,
) -> FrictionLaw:
    """Build a FrictionLaw from its JSON object

    Types:
        dry:      mu_plus / mu_minus (or symmetric mu)
        viscous:  mu_v
        bingham:  mu_v plus symmetric or asymmetric dry part
        stribeck: dry part plus psi = {"amplitude", "width"}
        custom:   any fields, extra graph allowed; tail_bounds required
    """
    if not isinstance(spec, dict):
        raise LawError("Law specification must be an object")
    kind = spec.get("type")
    if kind not in LAW_TYPES:
        raise LawError(f"Unknown law type {kind!r} (expected one of {', '.join(LAW_TYPES)})")

    needs_dry = kind in ("dry", "bingham", "stribeck")
    dry_default = None if needs_dry else 0.0
    if "mu" in spec and "mu_plus" not in spec:
        mu_plus = _signal_field(spec, ("mu",), period, bindings)
        mu_minus = _signal_field(spec, ("mu_minus", "mu"), period, bindings)
    else:
        mu_plus = _signal_field(spec, ("mu_plus",), period, bindings, dry_default)
        mu_minus = _signal_field(spec, ("mu_minus", "mu_plus"), period, bindings, dry_default)

    needs_viscous = kind in ("viscous", "bingham")
    mu_v = _signal_field(spec, ("mu_v",), period, bindings, None if needs_viscous else 0.0)

    extra = None
    if "extra" in spec:
        if kind != "custom":
            raise LawError("Only custom laws may carry an extra monotone graph")
        e = spec["extra"]
        extra = MonotoneGraph(
            tuple(float(x) for x in e.get("u", [])),
            tuple(float(y) for y in e.get("y", [])),
            float(e.get("slope_left", 0.0)),
            float(e.get("slope_right", 0.0)),
        )

    perturbation = None
    if "psi" in spec:
        if kind not in ("stribeck", "custom"):
            raise LawError(f"A {kind} law has no perturbation")
        psi = spec["psi"]
        if not isinstance(psi, dict) or "amplitude" not in psi or "width" not in psi:
            raise LawError("psi needs 'amplitude' and 'width'")
        perturbation = StribeckPerturbation(float(psi["amplitude"]), float(psi["width"]))
    elif kind == "stribeck":
        raise LawError("Stribeck law needs a 'psi' object")

    tails = None
    if "tail_bounds" in spec:
        tb = spec["tail_bounds"]
        try:
            tails = TailBounds(
                signal_from_spec(tb["minus"], period, bindings),
                signal_from_spec(tb["plus"], period, bindings),
                float(tb.get("R", 0.0)),
            )
        except (KeyError, TypeError) as e:
            raise LawError("tail_bounds needs 'minus', 'plus' and 'R'") from e
    elif kind == "custom":
        raise LawError("Custom laws must declare tail_bounds")

    return FrictionLaw(
        viscous_coeff=mu_v,
        dry_plus=mu_plus,
        dry_minus=mu_minus,
        extra_monotone=extra,
        perturbation=perturbation,
        declared_tail_bounds=tails,
        kind=kind,
    )
