"""
Crawler Models for crawlgait

Discrete crawlers (n point masses with prescribed shape velocities w_i)
and continuous crawlers (a body on [a, b] with prescribed deformation rate)
reduced to the barycentre dynamics

    v' in G(t, v) = (1/M) * (B(t) + sum_i F_i(t, v + w_i(t)))

or its continuous counterpart with the sum replaced by an integral over
the body.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from crawlgait.core.dynamics import DynamicsFlag, ReducedDynamics, TimeSlice
from crawlgait.core.friction import (
    FrictionLaw,
    LawClass,
    assemble_slice,
    classify_law,
    law_from_spec,
    monotone_part,
    tail_bounds,
)
from crawlgait.core.signals import (
    PeriodicSignal,
    Side,
    integrate_signal,
    mean_over_period,
    sample_grid,
    sampled_min,
    signal_from_spec,
    sup_abs,
    union_breakpoints,
)
from crawlgait.utils.exceptions import ConfigError, LawError, ModelError, SignalError
from crawlgait.utils.logger import get_logger


logger = get_logger("crawlgait.models")

# Margin added to sup|w| when choosing the dissipativity radius R
DEFAULT_EPS_R = 1e-6
ZERO_MEAN_TOL = 1e-8
BARYCENTRE_TOL = 1e-8
STRETCH_SAMPLES = 256


def _check_periods(signals: Sequence[PeriodicSignal], period: float, what: str) -> None:
    for s in signals:
        ratio = period / s.period
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ModelError(f"{what}: signal period {s.period:g} does not divide T = {period:g}")


# ---------------------------------------------------------------------------
# Discrete crawler
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteCrawler:
    """n point masses with prescribed shape velocities and friction laws"""
    masses: Tuple[float, ...]
    shape_velocities: Tuple[PeriodicSignal, ...]
    laws: Tuple[FrictionLaw, ...]
    load: PeriodicSignal
    period: float

    def __post_init__(self):
        n = len(self.masses)
        if n == 0:
            raise ModelError("Crawler needs at least one mass")
        if len(self.shape_velocities) != n or len(self.laws) != n:
            raise ModelError(
                f"Expected {n} shape velocities and laws, got "
                f"{len(self.shape_velocities)} and {len(self.laws)}"
            )
        if any(m < 0 for m in self.masses):
            raise ModelError("Masses must be non-negative")
        if not self.total_mass > 0:
            raise ModelError("total mass must be positive")
        if not self.period > 0:
            raise ModelError("Period must be positive")

        _check_periods(self.shape_velocities, self.period, "shape velocity")
        _check_periods([self.load], self.period, "load")
        for law in self.laws:
            _check_periods(law.signals(), self.period, "friction law")

        scale = max(sup_abs(w, 1024) for w in self.shape_velocities)
        for i, w in enumerate(self.shape_velocities):
            mean = mean_over_period(w)
            if abs(mean) > ZERO_MEAN_TOL * max(1.0, scale):
                raise ModelError(f"Shape velocity w_{i + 1} must have zero mean over a period, got {mean:.3g}")
        self._check_barycentre(scale)

    @property
    def total_mass(self) -> float:
        return float(sum(self.masses))

    @property
    def size(self) -> int:
        return len(self.masses)

    def _check_barycentre(self, scale: float) -> None:
        grid = np.linspace(0.0, self.period, 512, endpoint=False)
        weighted = sum(m * w.evaluate(grid) for m, w in zip(self.masses, self.shape_velocities))
        worst = float(np.max(np.abs(weighted)))
        if worst > BARYCENTRE_TOL * self.total_mass * max(scale, 1.0):
            logger.warning(
                f"Shape velocities are not barycentre-relative: max |sum m_i w_i| = {worst:.3g}"
            )


def _discrete_flag(crawler: DiscreteCrawler, reasons: List[str]) -> DynamicsFlag:
    classes = [classify_law(law) for law in crawler.laws]
    if LawClass.NON_MONOTONE in classes:
        reasons.append("a friction law carries a non-monotone perturbation")
        return DynamicsFlag.NON_MONOTONE
    if LawClass.STRICTLY_MONOTONE in classes:
        reasons.append("a friction law is strictly monotone")
        return DynamicsFlag.STRICTLY_MONOTONE
    if all(c == LawClass.DRY_ONLY for c in classes):
        smooth = True
        for i, law in enumerate(crawler.laws):
            for name, mu in (("mu_plus", law.dry_plus), ("mu_minus", law.dry_minus)):
                if not mu.breakpoint_set().is_continuous:
                    reasons.append(f"law {i + 1}: {name} jumps in time")
                    smooth = False
                elif sampled_min(mu) <= 0:
                    reasons.append(f"law {i + 1}: {name} is not positive")
                    smooth = False
        for i, w in enumerate(crawler.shape_velocities):
            if not w.breakpoint_set().is_continuous:
                reasons.append(f"shape velocity w_{i + 1} is discontinuous")
                smooth = False
        if not crawler.load.breakpoint_set().is_continuous:
            reasons.append("load B is discontinuous")
            smooth = False
        if smooth:
            reasons.append("dry friction with continuous positive coefficients and continuous w")
            return DynamicsFlag.SMOOTH_DRY
        reasons.append("dry friction only")
        return DynamicsFlag.MONOTONE
    reasons.append("monotone friction laws")
    return DynamicsFlag.MONOTONE


def reduce_discrete(crawler: DiscreteCrawler, eps_R: float = DEFAULT_EPS_R) -> ReducedDynamics:
    """G(t, v) = (1/M) * (B(t) + sum_i F_i(t, v + w_i(t)))"""
    M = crawler.total_mass
    T = crawler.period
    w_signals = crawler.shape_velocities
    laws = crawler.laws
    plain = [i for i, law in enumerate(laws) if law.extra_monotone is None]
    with_extra = [i for i, law in enumerate(laws) if law.extra_monotone is not None]
    perturbed = [i for i, law in enumerate(laws) if law.perturbation is not None]

    def build(s: float, side: Side) -> TimeSlice:
        w = np.array([float(sig.evaluate(s, side)) for sig in w_signals])
        coeffs = np.array([law.coefficients(s, side) for law in laws])
        mu_v, mu_p, mu_m = coeffs[:, 0], coeffs[:, 1], coeffs[:, 2]

        knots = [-w]
        slope = -float(np.sum(mu_v))
        slope_left = slope_right = slope
        for i in with_extra:
            graph = laws[i].extra_monotone
            knots.append(np.asarray(graph.knots_u) - w[i])
            slope_left -= graph.slope_left
            slope_right -= graph.slope_right

        def evaluate(v):
            u = v[None, :] + w[plain, None]
            lo, hi = monotone_part(mu_v[plain, None], mu_p[plain, None], mu_m[plain, None], u)
            lo, hi = lo.sum(axis=0), hi.sum(axis=0)
            for i in with_extra:
                e_lo, e_hi = monotone_part(mu_v[i], mu_p[i], mu_m[i], v + w[i], laws[i].extra_monotone)
                lo, hi = lo + e_lo, hi + e_hi
            return lo / M, hi / M

        perturbation = None
        if perturbed:
            def perturbation(v):
                total = np.zeros_like(v)
                for i in perturbed:
                    total = total + laws[i].perturbation.evaluate(s, v + w[i])
                return total / M

        monotone = assemble_slice(np.concatenate(knots), evaluate, slope_left / M, slope_right / M)
        load = float(crawler.load.evaluate(s, side)) / M
        return TimeSlice(monotone, load, w, (float(np.min(-w)), float(np.max(-w))), perturbation)

    signals = list(w_signals) + [crawler.load] + [s for law in laws for s in law.signals()]
    breakpoints = union_breakpoints(signals, T)

    sup_w = max(sup_abs(w) for w in w_signals)
    declared = [law.declared_tail_bounds.threshold for law in laws if law.declared_tail_bounds]
    R = sup_w + max([eps_R] + declared)
    u_min = R - sup_w

    def tail_sums(tau, side):
        minus = np.zeros_like(np.asarray(tau, dtype=float))
        plus = np.zeros_like(minus)
        for law in laws:
            lm, lp = tail_bounds(law, tau, u_min, side)
            minus = minus + lm
            plus = plus + lp
        return minus, plus

    reasons: List[str] = []
    flag = _discrete_flag(crawler, reasons)
    lipschitz = sum(laws[i].perturbation.lipschitz for i in perturbed) / M

    def knot_paths(s: float, side: Side) -> np.ndarray:
        return -np.array([float(sig.evaluate(s, side)) for sig in w_signals])

    dyn = ReducedDynamics(
        period=T,
        mass=M,
        slice_builder=build,
        flag=flag,
        breakpoints=breakpoints,
        load=crawler.load,
        tail_sums=tail_sums,
        R=R,
        explicit_lipschitz=lipschitz,
        kind="discrete",
        reasons=reasons,
        contact_count=crawler.size,
        knot_paths=knot_paths,
    )
    logger.info(f"Reduced discrete crawler: n={crawler.size}, M={M:g}, flag={flag.value}, R={R:.6g}")
    return dyn


# ---------------------------------------------------------------------------
# Continuous crawler
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContinuousCrawler:
    """Body on Omega = [edges[0], edges[-1]] split into cells

    Density, deformation rate, initial stretch and friction density law are
    constant in space on every cell.
    """
    edges: Tuple[float, ...]
    density: Tuple[float, ...]
    deformation_rate: Tuple[PeriodicSignal, ...]
    initial_stretch: Tuple[float, ...]
    laws: Tuple[FrictionLaw, ...]
    load: PeriodicSignal
    period: float
    stretch_bounds: Tuple[float, float] = (1e-3, 1e3)
    nodes_per_cell: int = 8
    positive_friction: bool = False

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        n = edges.size - 1
        if n < 1 or np.any(np.diff(edges) <= 0):
            raise ModelError("Cell edges must be strictly increasing with at least one cell")
        for name, seq in (("density", self.density), ("deformation_rate", self.deformation_rate),
                          ("initial_stretch", self.initial_stretch), ("laws", self.laws)):
            if len(seq) != n:
                raise ModelError(f"Expected {n} {name} entries, got {len(seq)}")
        if any(r < 0 for r in self.density):
            raise ModelError("Density must be non-negative")
        if not self.total_mass > 0:
            raise ModelError("total mass must be positive")
        if self.nodes_per_cell < 1:
            raise ModelError("nodes_per_cell must be at least 1")
        if any(law.extra_monotone is not None for law in self.laws):
            raise ModelError("Continuous friction densities cannot carry an extra monotone graph")

        _check_periods(self.deformation_rate, self.period, "deformation rate")
        _check_periods([self.load], self.period, "load")
        for law in self.laws:
            _check_periods(law.signals(), self.period, "friction law")

        self._check_stretch()
        if self.positive_friction and not self.has_positive_friction():
            raise ModelError("mu+ + mu- must be positive on every cell for a positive-friction model")

    @property
    def domain(self) -> Tuple[float, float]:
        return self.edges[0], self.edges[-1]

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(np.asarray(self.edges, dtype=float))

    @property
    def total_mass(self) -> float:
        return float(np.sum(np.asarray(self.density) * self.lengths))

    def _check_stretch(self) -> None:
        """phi(t) = phi(0) + int_0^t phidot stays within the stretch bounds"""
        phi_min, phi_max = self.stretch_bounds
        if not 0 < phi_min <= phi_max:
            raise ModelError("Stretch bounds must satisfy 0 < phi_min <= phi_max")
        grid = np.linspace(0.0, self.period, STRETCH_SAMPLES + 1)
        for c, (rate, phi0) in enumerate(zip(self.deformation_rate, self.initial_stretch)):
            mean = mean_over_period(rate)
            if abs(mean) > ZERO_MEAN_TOL * max(1.0, sup_abs(rate, 512)):
                raise ModelError(f"Deformation rate of cell {c + 1} must have zero mean, got {mean:.3g}")
            increments = [integrate_signal(rate, a, b) for a, b in zip(grid[:-1], grid[1:])]
            phi = phi0 + np.concatenate([[0.0], np.cumsum(increments)])
            if np.min(phi) < phi_min or np.max(phi) > phi_max:
                raise ModelError(
                    f"Stretch of cell {c + 1} leaves [{phi_min:g}, {phi_max:g}] "
                    f"(range [{np.min(phi):.4g}, {np.max(phi):.4g}])"
                )

    def has_positive_friction(self) -> bool:
        for law in self.laws:
            grid = sample_grid(law.dry_plus, 512)
            total = np.concatenate([
                law.dry_plus.evaluate(grid, side) + law.dry_minus.evaluate(grid, side)
                for side in (Side.RIGHT, Side.LEFT)
            ])
            if np.min(total) <= 0:
                return False
        return True

    def edge_velocities(self, t: float, side: Side = Side.RIGHT) -> np.ndarray:
        """z-dot at the cell edges; it is linear in between"""
        rates = np.array([float(r.evaluate(t, side)) for r in self.deformation_rate])
        lengths = self.lengths
        cumulative = np.concatenate([[0.0], np.cumsum(rates * lengths)])
        rho = np.asarray(self.density, dtype=float)
        mean = np.sum(rho * lengths * 0.5 * (cumulative[:-1] + cumulative[1:])) / self.total_mass
        return cumulative - mean


def relative_velocity(
    crawler: ContinuousCrawler,
    t: float,
    xi: float,
    side: Side = Side.RIGHT,
) -> float:
    """z-dot(t, xi) = (1/M) * int rho(s) int_s^xi phidot(t, r) dr ds

    Raises:
        ModelError: xi outside the body
    """
    a, b = crawler.domain
    if not a <= xi <= b:
        raise ModelError(f"Material point {xi} outside [{a}, {b}]")
    edges = np.asarray(crawler.edges, dtype=float)
    zdot = crawler.edge_velocities(t, side)
    return float(np.interp(xi, edges, zdot))


def reduce_continuous(crawler: ContinuousCrawler, eps_R: float = DEFAULT_EPS_R) -> ReducedDynamics:
    """G(t, v) = (1/M) * (B(t) + int_Omega f(t, xi, v + z-dot(t, xi)) dxi)

    Dry and viscous parts are integrated exactly per cell (z-dot is linear
    on each cell); perturbations use Gauss-Legendre nodes.
    """
    M = crawler.total_mass
    T = crawler.period
    laws = crawler.laws
    lengths = crawler.lengths
    n_cells = lengths.size
    nodes, weights = np.polynomial.legendre.leggauss(crawler.nodes_per_cell)
    # Node positions as fractions of each cell
    node_frac = 0.5 * (nodes + 1.0)
    perturbed = [c for c, law in enumerate(laws) if law.perturbation is not None]

    def build(s: float, side: Side) -> TimeSlice:
        zdot = crawler.edge_velocities(s, side)
        za, zb = zdot[:-1], zdot[1:]
        z_lo, z_hi = np.minimum(za, zb), np.maximum(za, zb)
        spread = z_hi - z_lo
        ramp = spread > 0
        coeffs = np.array([law.coefficients(s, side) for law in laws])
        mu_v, mu_p, mu_m = coeffs[:, 0], coeffs[:, 1], coeffs[:, 2]
        z_mean = 0.5 * (za + zb)

        def evaluate(v):
            vv = v[None, :]
            viscous = -(mu_v * lengths)[:, None] * (vv + z_mean[:, None])
            # Cells where z-dot is constant keep the set-valued stiction interval
            d_lo, d_hi = monotone_part(0.0, mu_p[:, None], mu_m[:, None], vv + za[:, None])
            safe = np.where(ramp, spread, 1.0)[:, None]
            frac = np.clip((vv + z_hi[:, None]) / safe, 0.0, 1.0)
            ramp_value = -mu_p[:, None] * frac + mu_m[:, None] * (1.0 - frac)
            d_lo = np.where(ramp[:, None], ramp_value, d_lo) * lengths[:, None]
            d_hi = np.where(ramp[:, None], ramp_value, d_hi) * lengths[:, None]
            lo = (viscous + d_lo).sum(axis=0)
            hi = (viscous + d_hi).sum(axis=0)
            return lo / M, hi / M

        slope = -float(np.sum(mu_v * lengths)) / M
        monotone = assemble_slice(np.concatenate([-za, -zb]), evaluate, slope, slope)

        node_z = za[:, None] + (zb - za)[:, None] * node_frac[None, :]
        perturbation = None
        if perturbed:
            def perturbation(v):
                total = np.zeros_like(v)
                for c in perturbed:
                    psi = laws[c].perturbation.evaluate(s, v[None, :] + node_z[c][:, None])
                    total = total + 0.5 * lengths[c] * (weights[:, None] * psi).sum(axis=0)
                return total / M

        load = float(crawler.load.evaluate(s, side)) / M
        envelope = (float(np.min(-zdot)), float(np.max(-zdot)))
        return TimeSlice(monotone, load, node_z.ravel(), envelope, perturbation)

    signals = list(crawler.deformation_rate) + [crawler.load] + [s for law in laws for s in law.signals()]
    breakpoints = union_breakpoints(signals, T)

    grid = np.unique(np.concatenate([np.linspace(0.0, T, 1024, endpoint=False),
                                     np.asarray(breakpoints.times, dtype=float)]))
    sup_z = max(
        float(np.max(np.abs(crawler.edge_velocities(t, side))))
        for t in grid for side in (Side.RIGHT, Side.LEFT)
    )
    declared = [law.declared_tail_bounds.threshold for law in laws if law.declared_tail_bounds]
    R = sup_z + max([eps_R] + declared)
    u_min = R - sup_z

    def tail_sums(tau, side):
        minus = np.zeros_like(np.asarray(tau, dtype=float))
        plus = np.zeros_like(minus)
        for c, law in enumerate(laws):
            lm, lp = tail_bounds(law, tau, u_min, side)
            minus = minus + lengths[c] * lm
            plus = plus + lengths[c] * lp
        return minus, plus

    reasons: List[str] = []
    flag = _continuous_flag(crawler, reasons)
    lipschitz = sum(lengths[c] * laws[c].perturbation.lipschitz for c in perturbed) / M

    dyn = ReducedDynamics(
        period=T,
        mass=M,
        slice_builder=build,
        flag=flag,
        breakpoints=breakpoints,
        load=crawler.load,
        tail_sums=tail_sums,
        R=R,
        explicit_lipschitz=lipschitz,
        kind="continuous",
        reasons=reasons,
        contact_count=n_cells * crawler.nodes_per_cell,
        knot_paths=lambda s, side: -crawler.edge_velocities(s, side),
    )
    logger.info(f"Reduced continuous crawler: cells={n_cells}, M={M:g}, flag={flag.value}, R={R:.6g}")
    return dyn


def _continuous_flag(crawler: ContinuousCrawler, reasons: List[str]) -> DynamicsFlag:
    if any(law.perturbation is not None for law in crawler.laws):
        reasons.append("a friction density carries a non-monotone perturbation")
        return DynamicsFlag.NON_MONOTONE
    if all(sampled_min(law.viscous_coeff, 512) > 0 for law in crawler.laws):
        reasons.append("positive viscous friction on every cell")
        return DynamicsFlag.STRICTLY_MONOTONE
    if crawler.has_positive_friction():
        if _dry_dissipative(crawler):
            reasons.append("mu+ + mu- > 0 on the whole body")
            return DynamicsFlag.CONTINUOUS_DRY
        reasons.append("positive dry friction, but the dry part alone is not dissipative")
        return DynamicsFlag.MONOTONE
    reasons.append("dry friction vanishes on part of the body")
    return DynamicsFlag.MONOTONE


def _dry_dissipative(crawler: ContinuousCrawler) -> bool:
    """Dissipativity with the viscous part dropped"""
    lengths = crawler.lengths
    T = crawler.period
    load = integrate_signal(crawler.load, 0.0, T)
    mu_plus = sum(L * integrate_signal(law.dry_plus, 0.0, T) for L, law in zip(lengths, crawler.laws))
    mu_minus = sum(L * integrate_signal(law.dry_minus, 0.0, T) for L, law in zip(lengths, crawler.laws))
    return load - mu_plus < 0 < load + mu_minus


# ---------------------------------------------------------------------------
# JSON specification
# ---------------------------------------------------------------------------

Crawler = Union[DiscreteCrawler, ContinuousCrawler]
MODEL_KINDS = ("discrete", "continuous")


def reduce_model(crawler: Crawler, eps_R: float = DEFAULT_EPS_R) -> ReducedDynamics:
    if isinstance(crawler, ContinuousCrawler):
        return reduce_continuous(crawler, eps_R)
    return reduce_discrete(crawler, eps_R)


def _number(value: Any, pointer: str, check: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"expected a finite number, got {value!r}", pointer, check)
    if positive and value <= 0:
        raise ConfigError(f"must be positive, got {value!r}", pointer, check)
    return float(value)


def _number_list(value: Any, pointer: str, check: str) -> Tuple[float, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a non-empty list of numbers", pointer, check)
    return tuple(_number(x, f"{pointer}/{i}", check) for i, x in enumerate(value))


def _signals(value: Any, pointer: str, period: float, params: Dict[str, float]) -> Tuple[PeriodicSignal, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a non-empty list of signals", pointer, "signal-list")
    result = []
    for i, item in enumerate(value):
        try:
            result.append(signal_from_spec(item, period, params))
        except SignalError as e:
            raise ConfigError(str(e), f"{pointer}/{i}", "signal") from e
    return tuple(result)


def _laws(value: Any, pointer: str, period: float, params: Dict[str, float]) -> Tuple[FrictionLaw, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a non-empty list of friction laws", pointer, "law-list")
    result = []
    for i, item in enumerate(value):
        try:
            result.append(law_from_spec(item, period, params))
        except (LawError, SignalError) as e:
            raise ConfigError(str(e), f"{pointer}/{i}", "law") from e
    return tuple(result)


def crawler_from_spec(
    spec: Dict[str, Any],
    params: Optional[Dict[str, float]] = None,
    pointer: str = "/model",
) -> Crawler:
    """Build a crawler from its JSON object

    Discrete: {"kind": "discrete", "T", "masses", "w", "laws", "load"}
    Continuous: {"kind": "continuous", "T", "edges", "density",
    "deformation_rate", "initial_stretch", "laws", "load",
    "stretch_bounds", "nodes_per_cell", "positive_friction"}
    Both accept "params": named constants usable in signal expressions.

    Raises:
        ConfigError: with the JSON pointer of the offending value
    """
    if not isinstance(spec, dict):
        raise ConfigError("model must be an object", pointer, "type")
    kind = spec.get("kind", "discrete")
    if kind not in MODEL_KINDS:
        raise ConfigError(f"unknown model kind {kind!r}", f"{pointer}/kind", "kind")

    names = dict(spec.get("params") or {})
    for key, value in names.items():
        _number(value, f"{pointer}/params/{key}", "param")
    names.update(params or {})
    period = _number(spec.get("T", names.get("T")), f"{pointer}/T", "T > 0", positive=True)
    names["T"] = period

    try:
        load = signal_from_spec(spec.get("load", 0.0), period, names)
    except SignalError as e:
        raise ConfigError(str(e), f"{pointer}/load", "signal") from e
    laws = _laws(spec.get("laws"), f"{pointer}/laws", period, names)

    try:
        if kind == "discrete":
            return DiscreteCrawler(
                masses=_number_list(spec.get("masses"), f"{pointer}/masses", "masses"),
                shape_velocities=_signals(spec.get("w"), f"{pointer}/w", period, names),
                laws=laws,
                load=load,
                period=period,
            )
        bounds = spec.get("stretch_bounds", [1e-3, 1e3])
        return ContinuousCrawler(
            edges=_number_list(spec.get("edges"), f"{pointer}/edges", "edges"),
            density=_number_list(spec.get("density"), f"{pointer}/density", "density"),
            deformation_rate=_signals(spec.get("deformation_rate"), f"{pointer}/deformation_rate", period, names),
            initial_stretch=_number_list(spec.get("initial_stretch"), f"{pointer}/initial_stretch", "initial_stretch"),
            laws=laws,
            load=load,
            period=period,
            stretch_bounds=tuple(_number_list(bounds, f"{pointer}/stretch_bounds", "stretch_bounds")[:2]),
            nodes_per_cell=int(spec.get("nodes_per_cell", 8)),
            positive_friction=bool(spec.get("positive_friction", False)),
        )
    except ModelError as e:
        raise ConfigError(str(e), pointer, "model-invariants") from e
