"""
Periodic Signals for crawlgait

T-periodic scalar functions of time used for shape velocities, loads and
friction coefficients. Signals are parsed from a small expression grammar:

    expr   := term (('+'|'-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | factor
    factor := number | name | 't' | func '(' args ')' | '(' expr ')'

with the functions sin(e), cos(e), square(e; P, amp), triangle(e; P, amp)
and piecewise(t; s0, e0; s1, e1; ...). Anything else is supplied as a
sampled table signal.

Evaluation is vectorised over numpy arrays. The public convention at a jump
is the right limit; the solver asks for left limits so that a step never
sees the next smooth piece of its data.
"""

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from crawlgait.utils.exceptions import (
    PeriodError,
    SignalError,
    SignalSyntaxError,
    UnboundNameError,
)


ArrayLike = Union[float, np.ndarray]

# Gauss-Legendre panels used by the period quadrature
QUAD_NODES = 8
QUAD_PANELS_PER_PERIOD = 16

PERIODICITY_SAMPLES = 1000
PERIODICITY_RTOL = 1e-9
LIPSCHITZ_SAMPLES = 10_000

BUILTIN_NAMES: Dict[str, float] = {"pi": math.pi}


class Side(str, Enum):
    """Which one-sided limit to return at a jump"""
    RIGHT = "right"
    LEFT = "left"


# ---------------------------------------------------------------------------
# Expression tree
# ---------------------------------------------------------------------------

class Node:
    """Expression tree node, evaluated on reduced times tau in [0, T]"""

    def evaluate(self, tau: np.ndarray, side: Side) -> np.ndarray:
        raise NotImplementedError

    def depends_on_t(self) -> bool:
        raise NotImplementedError

    def affine(self) -> Optional[Tuple[float, float]]:
        """Return (a, b) if the node equals a*t + b, else None"""
        return None

    def events(self, period: float) -> Tuple[List[float], List[float]]:
        """Return (jumps, kinks) in [0, period)"""
        return [], []


@dataclass(frozen=True)
class Const(Node):
    value: float

    def evaluate(self, tau, side):
        return np.full_like(tau, self.value, dtype=float)

    def depends_on_t(self):
        return False

    def affine(self):
        return 0.0, self.value


@dataclass(frozen=True)
class Time(Node):

    def evaluate(self, tau, side):
        return np.asarray(tau, dtype=float)

    def depends_on_t(self):
        return True

    def affine(self):
        return 1.0, 0.0


@dataclass(frozen=True)
class Scale(Node):
    factor: float
    child: Node

    def evaluate(self, tau, side):
        return self.factor * self.child.evaluate(tau, side)

    def depends_on_t(self):
        return self.child.depends_on_t()

    def affine(self):
        inner = self.child.affine()
        if inner is None:
            return None
        return self.factor * inner[0], self.factor * inner[1]

    def events(self, period):
        return self.child.events(period)


@dataclass(frozen=True)
class Sum(Node):
    left: Node
    right: Node

    def evaluate(self, tau, side):
        return self.left.evaluate(tau, side) + self.right.evaluate(tau, side)

    def depends_on_t(self):
        return self.left.depends_on_t() or self.right.depends_on_t()

    def affine(self):
        a, b = self.left.affine(), self.right.affine()
        if a is None or b is None:
            return None
        return a[0] + b[0], a[1] + b[1]

    def events(self, period):
        return _merge_events(self.left.events(period), self.right.events(period))


@dataclass(frozen=True)
class Product(Node):
    left: Node
    right: Node

    def evaluate(self, tau, side):
        return self.left.evaluate(tau, side) * self.right.evaluate(tau, side)

    def depends_on_t(self):
        return self.left.depends_on_t() or self.right.depends_on_t()

    def affine(self):
        a, b = self.left.affine(), self.right.affine()
        if a is None or b is None:
            return None
        if a[0] == 0.0:
            return a[1] * b[0], a[1] * b[1]
        if b[0] == 0.0:
            return b[1] * a[0], b[1] * a[1]
        return None

    def events(self, period):
        return _merge_events(self.left.events(period), self.right.events(period))


_FUNCS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "sin": np.sin,
    "cos": np.cos,
}


@dataclass(frozen=True)
class Func(Node):
    name: str
    arg: Node

    def evaluate(self, tau, side):
        return _FUNCS[self.name](self.arg.evaluate(tau, side))

    def depends_on_t(self):
        return self.arg.depends_on_t()

    def events(self, period):
        return self.arg.events(period)


@dataclass(frozen=True)
class Wave(Node):
    """square/triangle primitive of an affine argument

    square:   +amp on [0, P/2), -amp on [P/2, P)
    triangle: -amp at phase 0 rising to +amp at P/2; its derivative is
              square(t; P, 4*amp/P)
    """
    kind: str
    arg: Node
    wave_period: float
    amplitude: float

    def _phase(self, tau: np.ndarray, side: Side) -> np.ndarray:
        a, b = self.arg.affine()
        phase = np.mod((a * tau + b) / self.wave_period, 1.0)
        # Left limit in time is the left limit in phase only for increasing arguments
        if (side == Side.LEFT) == (a > 0):
            phase = np.where(phase == 0.0, 1.0, phase)
            return phase, True
        return phase, False

    def evaluate(self, tau, side):
        phase, left = self._phase(np.asarray(tau, dtype=float), side)
        if self.kind == "square":
            first_half = (phase <= 0.5) & (phase > 0.0) if left else phase < 0.5
            return np.where(first_half, self.amplitude, -self.amplitude)
        return self.amplitude * (1.0 - 4.0 * np.abs(phase - 0.5))

    def depends_on_t(self):
        return self.arg.depends_on_t()

    def events(self, period):
        a, b = self.arg.affine()
        if a == 0.0:
            return [], []
        half = self.wave_period / 2.0
        # a*t + b = k*half for t in [0, period)
        lo, hi = sorted((b, a * period + b))
        k_first = math.ceil(lo / half - 1e-12)
        k_last = math.floor(hi / half + 1e-12)
        times = []
        for k in range(k_first, k_last + 1):
            t = (k * half - b) / a
            if -1e-12 * period <= t < period * (1.0 - 1e-15):
                times.append(max(t, 0.0))
        if self.kind == "square":
            return times, []
        return [], times


@dataclass(frozen=True)
class Piecewise(Node):
    """pieces[k] on [starts[k], starts[k+1]), the last piece wrapping around"""
    starts: Tuple[float, ...]
    pieces: Tuple[Node, ...]
    period: float

    def evaluate(self, tau, side):
        tau = np.mod(np.asarray(tau, dtype=float), self.period)
        if side == Side.LEFT:
            tau = np.where(tau == 0.0, self.period, tau)
        starts = np.asarray(self.starts)
        how = "right" if side == Side.RIGHT else "left"
        idx = np.mod(np.searchsorted(starts, tau, side=how) - 1, len(starts))
        result = np.empty_like(tau, dtype=float)
        for k, piece in enumerate(self.pieces):
            mask = idx == k
            if np.any(mask):
                result[mask] = piece.evaluate(tau[mask], side)
        return result

    def depends_on_t(self):
        return True

    def events(self, period):
        jumps = [s for s in self.starts]
        kinks: List[float] = []
        for piece in self.pieces:
            j, k = piece.events(period)
            jumps.extend(j)
            kinks.extend(k)
        return jumps, kinks


@dataclass(frozen=True)
class Table(Node):
    """Periodic linear interpolation of samples; knots are kinks"""
    times: Tuple[float, ...]
    values: Tuple[float, ...]
    period: float

    def evaluate(self, tau, side):
        return np.interp(tau, self.times, self.values, period=self.period)

    def depends_on_t(self):
        return True

    def events(self, period):
        return [], list(self.times)


def _merge_events(a, b):
    return a[0] + b[0], a[1] + b[1]


# ---------------------------------------------------------------------------
# Signals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BreakpointSet:
    """Sorted jump/kink times within one period"""
    times: Tuple[float, ...]
    jumps: Tuple[float, ...] = ()

    @property
    def is_continuous(self) -> bool:
        return not self.jumps

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self):
        return iter(self.times)

    def union(self, other: "BreakpointSet", period: float) -> "BreakpointSet":
        return BreakpointSet(
            times=_normalize_times(list(self.times) + list(other.times), period),
            jumps=_normalize_times(list(self.jumps) + list(other.jumps), period),
        )


def _normalize_times(times: Sequence[float], period: float) -> Tuple[float, ...]:
    """Reduce to [0, period), sort and merge entries closer than 1e-12*period"""
    if not times:
        return ()
    reduced = np.mod(np.asarray(times, dtype=float), period)
    reduced[np.isclose(reduced, period, rtol=0.0, atol=1e-12 * period)] = 0.0
    reduced.sort()
    merged = [float(reduced[0])]
    for t in reduced[1:]:
        if t - merged[-1] > 1e-12 * period:
            merged.append(float(t))
    return tuple(merged)


class SignalBase:
    """Common interface: a T-periodic function with a known breakpoint set"""

    period: float

    def evaluate(self, t: ArrayLike, side: Side = Side.RIGHT) -> ArrayLike:
        scalar = np.ndim(t) == 0
        tau = np.mod(np.asarray(t, dtype=float), self.period)
        if side == Side.LEFT:
            tau = np.where(tau == 0.0, self.period, tau)
        values = self._evaluate_reduced(np.atleast_1d(tau), side)
        return float(values[0]) if scalar else values

    def __call__(self, t: ArrayLike, side: Side = Side.RIGHT) -> ArrayLike:
        return self.evaluate(t, side)

    def _evaluate_reduced(self, tau: np.ndarray, side: Side) -> np.ndarray:
        raise NotImplementedError

    def breakpoint_set(self) -> BreakpointSet:
        raise NotImplementedError


@dataclass(frozen=True)
class PeriodicSignal(SignalBase):
    """Parsed periodic signal (immutable, safe to share between workers)"""
    period: float
    expression: Node
    declared_lipschitz: Optional[float] = None
    source: Optional[str] = field(default=None, compare=False)

    def _evaluate_reduced(self, tau, side):
        return self.expression.evaluate(tau, side)

    def breakpoint_set(self) -> BreakpointSet:
        jumps, kinks = self.expression.events(self.period)
        jumps_n = _normalize_times(jumps, self.period)
        return BreakpointSet(
            times=_normalize_times(list(jumps_n) + kinks, self.period),
            jumps=jumps_n,
        )

    def to_spec(self) -> Union[str, float, dict]:
        """Serialize back to the JSON form accepted by signal_from_spec()"""
        if isinstance(self.expression, Table):
            spec: dict = {"table": {"t": list(self.expression.times),
                                    "v": list(self.expression.values)}}
            if self.declared_lipschitz is not None:
                spec["lipschitz"] = self.declared_lipschitz
            return spec
        if isinstance(self.expression, Const) and self.declared_lipschitz is None:
            return self.expression.value
        if self.source is None:
            raise SignalError("Signal has no source text to serialize")
        return self.source


@dataclass(frozen=True)
class DerivedSignal(SignalBase):
    """Periodic function computed from other signals (bounds, envelopes)"""
    period: float
    fn: Callable[[np.ndarray, Side], np.ndarray] = field(compare=False)
    breakpoints_: BreakpointSet = BreakpointSet(())

    def _evaluate_reduced(self, tau, side):
        return np.asarray(self.fn(tau, side), dtype=float)

    def breakpoint_set(self) -> BreakpointSet:
        return self.breakpoints_


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[+\-*();,]))"
)


@dataclass
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN_RE.match(text, pos)
        if not match or match.end() == pos:
            raise SignalSyntaxError("Unexpected character", text, pos)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append(_Token(kind, match.group(kind), start))
        pos = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser producing an expression tree"""

    def __init__(self, text: str, bindings: Dict[str, float], period: float):
        self.text = text
        self.bindings = bindings
        self.period = period
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def _advance(self) -> _Token:
        token = self.current
        self.index += 1
        return token

    def _expect(self, text: str) -> None:
        if self.current.text != text:
            raise SignalSyntaxError(f"Expected {text!r}", self.text, self.current.pos)
        self._advance()

    def _error(self, message: str) -> SignalSyntaxError:
        return SignalSyntaxError(message, self.text, self.current.pos)

    def parse(self) -> Node:
        node = self.expr()
        if self.current.kind != "end":
            raise self._error("Unexpected token")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.current.text in ("+", "-"):
            op = self._advance().text
            rhs = self.term()
            node = Sum(node, rhs if op == "+" else Scale(-1.0, rhs))
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.current.text == "*":
            self._advance()
            node = _fold_product(node, self.unary())
        return node

    def unary(self) -> Node:
        if self.current.text == "-":
            self._advance()
            child = self.unary()
            if isinstance(child, Const):
                return Const(-child.value)
            return Scale(-1.0, child)
        return self.factor()

    def factor(self) -> Node:
        token = self.current
        if token.kind == "number":
            self._advance()
            return Const(float(token.text))
        if token.text == "(":
            self._advance()
            node = self.expr()
            self._expect(")")
            return node
        if token.kind == "name":
            self._advance()
            if self.current.text == "(":
                return self._call(token)
            if token.text == "t":
                return Time()
            if token.text in self.bindings:
                return Const(float(self.bindings[token.text]))
            if token.text in BUILTIN_NAMES:
                return Const(BUILTIN_NAMES[token.text])
            raise UnboundNameError(token.text)
        raise self._error("Unexpected token")

    def _constant(self, node: Node, what: str, pos: int) -> float:
        if node.depends_on_t():
            raise SignalSyntaxError(f"{what} must not depend on t", self.text, pos)
        return float(node.evaluate(np.zeros(1), Side.RIGHT)[0])

    def _call(self, name_token: _Token) -> Node:
        name = name_token.text
        self._expect("(")
        if name in _FUNCS:
            arg = self.expr()
            self._expect(")")
            return Func(name, arg)
        if name in ("square", "triangle"):
            arg = self.expr()
            if arg.affine() is None:
                raise SignalSyntaxError("Wave argument must be affine in t", self.text, name_token.pos)
            self._expect(";")
            pos = self.current.pos
            wave_period = self._constant(self.expr(), "Wave period", pos)
            self._expect(",")
            pos = self.current.pos
            amplitude = self._constant(self.expr(), "Wave amplitude", pos)
            self._expect(")")
            if wave_period <= 0:
                raise PeriodError(f"Wave period must be positive, got {wave_period}")
            return Wave(name, arg, wave_period, amplitude)
        if name == "piecewise":
            if self.current.text != "t":
                raise self._error("piecewise() expects 't' as first argument")
            self._advance()
            starts: List[float] = []
            pieces: List[Node] = []
            while self.current.text == ";":
                self._advance()
                pos = self.current.pos
                starts.append(self._constant(self.expr(), "Piece start", pos))
                self._expect(",")
                pieces.append(self.expr())
            self._expect(")")
            if not pieces:
                raise self._error("piecewise() needs at least one piece")
            if any(b <= a for a, b in zip(starts, starts[1:])):
                raise SignalSyntaxError("Piece starts must be increasing", self.text, name_token.pos)
            if starts[0] < 0 or starts[-1] >= self.period:
                raise SignalSyntaxError("Piece starts must lie in [0, T)", self.text, name_token.pos)
            return Piecewise(tuple(starts), tuple(pieces), self.period)
        raise SignalSyntaxError(f"Unknown function {name!r}", self.text, name_token.pos)


def _fold_product(left: Node, right: Node) -> Node:
    if isinstance(left, Const) and isinstance(right, Const):
        return Const(left.value * right.value)
    if isinstance(left, Const):
        return Scale(left.value, right)
    if isinstance(right, Const):
        return Scale(right.value, left)
    return Product(left, right)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def _resolve_period(bindings: Dict[str, float], period: Optional[float]) -> float:
    if period is None:
        if "T" not in bindings:
            raise UnboundNameError("T")
        period = bindings["T"]
    period = float(period)
    if not math.isfinite(period) or period <= 0:
        raise PeriodError(f"Period must be positive, got {period}")
    return period


def _check_periodic(signal: PeriodicSignal) -> None:
    """Raw (unreduced) expression must repeat after one period"""
    tau = np.linspace(0.0, signal.period, PERIODICITY_SAMPLES, endpoint=False)
    base = signal.expression.evaluate(tau, Side.RIGHT)
    shifted = signal.expression.evaluate(tau + signal.period, Side.RIGHT)
    bad = np.abs(shifted - base) > PERIODICITY_RTOL * (1.0 + np.abs(base))
    # Jump times may land on either side after the shift
    if np.any(bad):
        bps = np.asarray(signal.breakpoint_set().jumps)
        if bps.size:
            near = np.min(np.abs(tau[bad, None] - bps[None, :]), axis=1) < 1e-9 * signal.period
            bad_count = int(np.sum(~near))
        else:
            bad_count = int(np.sum(bad))
        if bad_count:
            raise PeriodError(
                f"Expression is not {signal.period:g}-periodic ({bad_count} samples differ)"
            )


def parse_signal(
    text: str,
    bindings: Optional[Dict[str, float]] = None,
    period: Optional[float] = None,
    declared_lipschitz: Optional[float] = None,
) -> PeriodicSignal:
    """Parse an expression into a PeriodicSignal

    Args:
        text: Expression in the signal grammar
        bindings: Values of free names; "T" is the period unless given explicitly
        period: Signal period (overrides bindings["T"])
        declared_lipschitz: Optional Lipschitz constant

    Raises:
        SignalSyntaxError, UnboundNameError, PeriodError
    """
    bindings = dict(bindings or {})
    period = _resolve_period(bindings, period)
    bindings.setdefault("T", period)
    expression = _Parser(text, bindings, period).parse()
    signal = PeriodicSignal(period, expression, declared_lipschitz, source=text)
    _check_periodic(signal)
    return signal


def table_signal(
    times: Sequence[float],
    values: Sequence[float],
    period: float,
    declared_lipschitz: Optional[float] = None,
) -> PeriodicSignal:
    """Sampled signal with periodic linear interpolation between knots"""
    period = _resolve_period({}, period)
    times_a = np.asarray(times, dtype=float)
    values_a = np.asarray(values, dtype=float)
    if times_a.ndim != 1 or times_a.shape != values_a.shape or times_a.size < 2:
        raise SignalError("Table needs matching 1-D time and value lists (at least 2 samples)")
    if np.any(np.diff(times_a) <= 0) or times_a[0] < 0 or times_a[-1] >= period:
        raise SignalError("Table times must be strictly increasing within [0, T)")
    node = Table(tuple(times_a.tolist()), tuple(values_a.tolist()), period)
    return PeriodicSignal(period, node, declared_lipschitz)


def constant_signal(value: float, period: float) -> PeriodicSignal:
    return PeriodicSignal(_resolve_period({}, period), Const(float(value)), source=repr(float(value)))


def signal_from_spec(
    spec: Union[str, float, int, dict],
    period: float,
    bindings: Optional[Dict[str, float]] = None,
) -> PeriodicSignal:
    """Build a signal from its JSON form: expression string, number or table"""
    if isinstance(spec, bool):
        raise SignalError("Signal spec must be a string, number or table")
    if isinstance(spec, (int, float)):
        return constant_signal(float(spec), period)
    if isinstance(spec, str):
        return parse_signal(spec, bindings, period=period)
    if isinstance(spec, dict) and "table" in spec:
        table = spec["table"]
        return table_signal(table.get("t", []), table.get("v", []), period,
                            spec.get("lipschitz"))
    raise SignalError("Signal spec must be a string, number or table")


def eval_signal(s: SignalBase, t: ArrayLike) -> ArrayLike:
    """Right-continuous value of s at t (reduced modulo T)"""
    return s.evaluate(t, Side.RIGHT)


def breakpoints(s: SignalBase) -> BreakpointSet:
    """All jump/kink times of s within one period"""
    return s.breakpoint_set()


def union_breakpoints(signals: Sequence[SignalBase], period: float) -> BreakpointSet:
    result = BreakpointSet(())
    for s in signals:
        bps = s.breakpoint_set()
        # Signals with a shorter period repeat within the common period
        if not math.isclose(s.period, period):
            reps = int(round(period / s.period))
            shifted = [t + k * s.period for k in range(reps) for t in bps.times]
            shifted_j = [t + k * s.period for k in range(reps) for t in bps.jumps]
            bps = BreakpointSet(_normalize_times(shifted, period), _normalize_times(shifted_j, period))
        result = result.union(bps, period)
    return result


def _split_points(s: SignalBase, t0: float, t1: float) -> np.ndarray:
    period = s.period
    bps = np.asarray(s.breakpoint_set().times, dtype=float)
    points = [t0, t1]
    if bps.size:
        first, last = math.floor(t0 / period), math.ceil(t1 / period)
        for k in range(first, last + 1):
            shifted = bps + k * period
            points.extend(shifted[(shifted > t0) & (shifted < t1)].tolist())
    return np.unique(np.asarray(points))


def integrate_signal(
    s: SignalBase,
    t0: float,
    t1: float,
    nodes: int = QUAD_NODES,
    panels_per_period: int = QUAD_PANELS_PER_PERIOD,
) -> float:
    """Integral of s over [t0, t1], Gauss-Legendre on pieces split at breakpoints"""
    if t1 == t0:
        return 0.0
    if t1 < t0:
        return -integrate_signal(s, t1, t0, nodes, panels_per_period)

    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = _split_points(s, t0, t1)
    max_width = s.period / panels_per_period

    lefts, rights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        count = max(1, math.ceil((b - a) / max_width))
        cuts = np.linspace(a, b, count + 1)
        lefts.append(cuts[:-1])
        rights.append(cuts[1:])
    lo = np.concatenate(lefts)
    hi = np.concatenate(rights)

    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    points = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    values = np.asarray(s.evaluate(points, Side.RIGHT)).reshape(lo.size, nodes)
    return float(np.sum(half[:, None] * w[None, :] * values))


def mean_over_period(s: SignalBase, nodes: int = QUAD_NODES) -> float:
    """(1/T) * integral of s over one period"""
    return integrate_signal(s, 0.0, s.period, nodes=nodes) / s.period


def l1_norm(s: SignalBase) -> float:
    """L1(0, T) norm of s"""
    magnitude = DerivedSignal(
        s.period,
        lambda tau, side: np.abs(s.evaluate(tau, side)),
        s.breakpoint_set(),
    )
    # |s| adds kinks at sign changes; denser panels keep the error small
    return integrate_signal(magnitude, 0.0, s.period, panels_per_period=256)


def sample_grid(s: SignalBase, n: int = 1000) -> np.ndarray:
    """Uniform grid over one period merged with the breakpoints"""
    grid = np.linspace(0.0, s.period, n, endpoint=False)
    return np.unique(np.concatenate([grid, np.asarray(s.breakpoint_set().times, dtype=float)]))


def sup_abs(s: SignalBase, n: int = 4096) -> float:
    """Sampled sup |s| using both one-sided limits at breakpoints"""
    grid = sample_grid(s, n)
    return float(max(np.max(np.abs(s.evaluate(grid, Side.RIGHT))),
                     np.max(np.abs(s.evaluate(grid, Side.LEFT)))))


def sampled_min(s: SignalBase, n: int = 4096) -> float:
    grid = sample_grid(s, n)
    return float(min(np.min(s.evaluate(grid, Side.RIGHT)), np.min(s.evaluate(grid, Side.LEFT))))


def lipschitz_estimate(s: PeriodicSignal, samples: int = LIPSCHITZ_SAMPLES) -> float:
    """Declared Lipschitz constant, or a divided-difference estimate

    Differences straddling a jump are skipped; the estimate is used for
    step-size safety only.
    """
    if s.declared_lipschitz is not None:
        return float(s.declared_lipschitz)
    grid = np.linspace(0.0, s.period, samples + 1)
    values = s.evaluate(grid, Side.RIGHT)
    slopes = np.abs(np.diff(values)) / np.diff(grid)
    jumps = np.asarray(s.breakpoint_set().jumps, dtype=float)
    if jumps.size:
        left, right = grid[:-1], grid[1:]
        straddle = np.any((jumps[None, :] > left[:, None]) & (jumps[None, :] <= right[:, None]), axis=1)
        slopes = slopes[~straddle]
    return float(np.max(slopes)) if slopes.size else 0.0
