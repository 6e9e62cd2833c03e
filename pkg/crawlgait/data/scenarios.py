"""
Scenario Registry for crawlgait

Named reference models. Each entry is a model JSON template built through
crawler_from_spec() with its parameters bound, so a scenario and the
equivalent config file produce the same dynamics.
"""

import copy
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

from crawlgait.core.models import Crawler, crawler_from_spec
from crawlgait.utils.exceptions import ConfigError


GRAVITY = 9.81

# Overrides every scenario accepts; they only touch the load
LOAD_PARAMS = ("theta", "load")


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    template: Dict[str, Any] = field(repr=False)
    defaults: Dict[str, float] = field(default_factory=dict)
    expected: str = ""

    @property
    def parameters(self) -> Tuple[str, ...]:
        return tuple(self.defaults) + tuple(p for p in LOAD_PARAMS if p not in self.defaults)


_DRY = {"type": "dry", "mu": 1}

_SQUARE_PAIR = ["-1*square(t;T,alpha)", "square(t;T,alpha)"]

SCENARIOS: Dict[str, Scenario] = {
    s.name: s
    for s in (
        Scenario(
            name="ex-dry",
            description="Two equal dry contacts, square-wave shape change",
            template={
                "kind": "discrete",
                "masses": [0.5, 0.5],
                "w": _SQUARE_PAIR,
                "laws": [_DRY, _DRY],
            },
            defaults={"alpha": 1.0, "T": 1.0},
            expected="plateau of constant periodic velocities [-alpha, alpha]",
        ),
        Scenario(
            name="ex-drystar",
            description="ex-dry with doubled friction on the first contact",
            template={
                "kind": "discrete",
                "masses": [0.5, 0.5],
                "w": _SQUARE_PAIR,
                "laws": [{"type": "dry", "mu": 2}, _DRY],
            },
            defaults={"alpha": 1.0, "T": 2.0},
            expected="triangular periodic orbits, average velocity u0 + T/4",
        ),
        Scenario(
            name="ex-strib",
            description="ex-dry with a Stribeck dip on both contacts",
            template={
                "kind": "discrete",
                "masses": [0.5, 0.5],
                "w": _SQUARE_PAIR,
                "laws": [
                    {"type": "stribeck", "mu": 1, "psi": {"amplitude": 0.5, "width": "alpha"}},
                    {"type": "stribeck", "mu": 1, "psi": {"amplitude": 0.5, "width": "alpha"}},
                ],
            },
            defaults={"alpha": 1.0, "T": 1.0},
            expected="three periodic solutions -alpha, 0, alpha",
        ),
        Scenario(
            name="ex-incomp",
            description="Constant viscous friction, cosine shape change",
            template={
                "kind": "discrete",
                "T": 2 * math.pi,
                "masses": [1.0, 1.0],
                "w": ["cos(t)", "-cos(t)"],
                "laws": [{"type": "viscous", "mu_v": 1}, {"type": "viscous", "mu_v": 2}],
            },
            expected="unique periodic solution with zero net displacement",
        ),
        Scenario(
            name="ex-comp",
            description="Time-modulated viscous friction, sine shape change",
            template={
                "kind": "discrete",
                "T": 2 * math.pi,
                "masses": [1.0, 1.0],
                "w": ["-sin(t)", "sin(t)"],
                "laws": [{"type": "viscous", "mu_v": "2+sin(t)"},
                         {"type": "viscous", "mu_v": "2-sin(t)"}],
            },
            expected="unique periodic solution, net displacement pi/2 per period",
        ),
        Scenario(
            name="cont-dry",
            description="Three-cell continuous body reproducing ex-dry",
            template={
                "kind": "continuous",
                "edges": [0.0, 1.0, 2.0, 3.0],
                "density": [1 / 3, 1 / 3, 1 / 3],
                "deformation_rate": ["0", "2*square(t;T,alpha)", "0"],
                "initial_stretch": [1.0, 1.0, 1.0],
                "stretch_bounds": [0.5, 2.5],
                "laws": [_DRY, {"type": "dry", "mu": 0}, _DRY],
            },
            defaults={"alpha": 1.0, "T": 1.0},
            expected="same G as ex-dry: plateau [-alpha, alpha]",
        ),
        Scenario(
            name="smooth-dry",
            description="Dry friction with smooth shape change",
            template={
                "kind": "discrete",
                "T": 2 * math.pi,
                "masses": [0.5, 0.5],
                "w": ["cos(t)", "-cos(t)"],
                "laws": [_DRY, _DRY],
            },
            expected="unique periodic solution at 0",
        ),
        Scenario(
            name="slope-dry",
            description="ex-dry on a slope",
            template={
                "kind": "discrete",
                "masses": [0.5, 0.5],
                "w": _SQUARE_PAIR,
                "laws": [_DRY, _DRY],
            },
            defaults={"alpha": 1.0, "T": 1.0, "load": 1.0},
            expected="dissipative while the downhill pull stays below the total friction",
        ),
    )
}


def list_scenarios():
    return list(SCENARIOS.values())


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise ConfigError(
            f"unknown scenario {name!r} (known: {', '.join(SCENARIOS)})", "/scenario", "registry"
        ) from None


def validate_overrides(scenario: Scenario, overrides: Dict[str, Any], pointer: str = "") -> Dict[str, float]:
    """Type-check overrides against the parameters a scenario accepts"""
    result = {}
    for key, value in overrides.items():
        if key not in scenario.parameters:
            raise ConfigError(
                f"scenario {scenario.name} has no parameter {key!r} "
                f"(accepts: {', '.join(scenario.parameters)})",
                f"{pointer}/{key}", "scenario-parameter",
            )
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(f"expected a finite number, got {value!r}", f"{pointer}/{key}", "number")
        result[key] = float(value)
    if "theta" in result and "load" in result:
        raise ConfigError("give either theta or load, not both", f"{pointer}/theta", "exclusive-load")
    if "T" in result and result["T"] <= 0:
        raise ConfigError("must be positive", f"{pointer}/T", "T > 0")
    return result


def scenario_spec(name: str, overrides: Dict[str, Any] = None) -> Dict[str, Any]:
    """Model JSON of a scenario with its parameters bound"""
    scenario = get_scenario(name)
    params = dict(scenario.defaults)
    params.update(validate_overrides(scenario, overrides or {}))

    spec = copy.deepcopy(scenario.template)
    for law in spec["laws"]:
        psi = law.get("psi")
        if psi and isinstance(psi.get("width"), str):
            psi["width"] = params[psi["width"]]

    theta = params.pop("theta", None)
    pull = params.pop("load", None)
    if theta is not None:
        masses = spec.get("masses") or [
            r * (b - a) for r, a, b in zip(spec["density"], spec["edges"], spec["edges"][1:])
        ]
        spec["load"] = -sum(masses) * GRAVITY * math.sin(theta)
    elif pull is not None:
        spec["load"] = -pull

    if "T" in params:
        spec["T"] = params["T"]
    spec["params"] = params
    return spec


def build_scenario(name: str, overrides: Dict[str, Any] = None) -> Crawler:
    return crawler_from_spec(scenario_spec(name, overrides), pointer=f"/scenario/{name}")
