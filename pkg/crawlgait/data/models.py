"""
Run Configuration Models for crawlgait

Dataclass-based records for a run: the model (inline JSON or a registry
scenario), solver settings, command parameters and output location.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

from crawlgait.core.models import Crawler, crawler_from_spec
from crawlgait.core.solver import SolverConfig
from crawlgait.data.scenarios import build_scenario, get_scenario, validate_overrides
from crawlgait.utils.exceptions import ConfigError


SCENARIO_SHORTHAND = ("alpha", "T", "theta", "load")
TOP_LEVEL_KEYS = {"name", "scenario", "overrides", "model", "solver", "run", "output", "eps_R"} | set(SCENARIO_SHORTHAND)


@dataclass(frozen=True)
class ScenarioId:
    """Registry scenario name with parameter overrides"""

    name: str
    overrides: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        scenario = get_scenario(self.name)
        object.__setattr__(self, "overrides", validate_overrides(scenario, self.overrides, "/overrides"))

    def build(self) -> Crawler:
        return build_scenario(self.name, self.overrides)

    def to_dict(self) -> Dict[str, Any]:
        return {"scenario": self.name, "overrides": dict(self.overrides)}


def _positive(data: Dict[str, Any], key: str, default, kind=float):
    value = data.get(key, default)
    if value is None:
        return None
    pointer = f"/run/{key}"
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"expected a number, got {value!r}", pointer, "number")
    if kind is int and int(value) != value:
        raise ConfigError(f"expected an integer, got {value!r}", pointer, "integer")
    if value <= 0:
        raise ConfigError(f"must be positive, got {value!r}", pointer, f"{key} > 0")
    return kind(value)


@dataclass(frozen=True)
class RunParams:
    """Command parameters shared by all commands"""

    v0: Optional[float] = None
    periods: int = 1
    tol: float = 1e-6
    grid_n: int = 512
    kmax: int = 10_000
    periodicity_tol: float = 1e-6
    settle_tol: float = 1e-9
    gamma_grid: int = 10_000

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunParams":
        if not isinstance(data, dict):
            raise ConfigError("run parameters must be an object", "/run", "type")
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(f"unknown run parameter {key!r}", f"/run/{key}", "known-fields")
        v0 = data.get("v0")
        if v0 is not None and (isinstance(v0, bool) or not isinstance(v0, (int, float)) or not math.isfinite(v0)):
            raise ConfigError(f"expected a finite number, got {v0!r}", "/run/v0", "number")
        return cls(
            v0=float(v0) if v0 is not None else None,
            periods=_positive(data, "periods", 1, int),
            tol=_positive(data, "tol", 1e-6),
            grid_n=_positive(data, "grid_n", 512, int),
            kmax=_positive(data, "kmax", 10_000, int),
            periodicity_tol=_positive(data, "periodicity_tol", 1e-6),
            settle_tol=_positive(data, "settle_tol", 1e-9),
            gamma_grid=_positive(data, "gamma_grid", 10_000, int),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "v0": self.v0,
            "periods": self.periods,
            "tol": self.tol,
            "grid_n": self.grid_n,
            "kmax": self.kmax,
            "periodicity_tol": self.periodicity_tol,
            "settle_tol": self.settle_tol,
            "gamma_grid": self.gamma_grid,
        }


@dataclass(frozen=True)
class RunConfig:
    """A fully validated run: exactly one of model and scenario is set"""

    scenario: Optional[ScenarioId] = None
    model: Optional[Dict[str, Any]] = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    run: RunParams = field(default_factory=RunParams)
    output: Optional[str] = None
    name: Optional[str] = None
    eps_R: float = 1e-6

    def __post_init__(self):
        if (self.scenario is None) == (self.model is None):
            raise ConfigError("exactly one of 'model' and 'scenario' is required", "", "model-xor-scenario")
        if not self.eps_R > 0:
            raise ConfigError("must be positive", "/eps_R", "eps_R > 0")
        # Validates the model eagerly
        self.build_model()

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return self.scenario.name if self.scenario else "model"

    def build_model(self) -> Crawler:
        if self.scenario is not None:
            return self.scenario.build()
        return crawler_from_spec(self.model)

    def replace(self, **changes) -> "RunConfig":
        data = {
            "scenario": self.scenario,
            "model": self.model,
            "solver": self.solver,
            "run": self.run,
            "output": self.output,
            "name": self.name,
            "eps_R": self.eps_R,
        }
        data.update(changes)
        return RunConfig(**data)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Create RunConfig from its JSON object"""
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object", "", "type")
        unknown = set(data) - TOP_LEVEL_KEYS
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(f"unknown key {key!r}", f"/{key}", "known-fields")

        scenario = None
        if "scenario" in data:
            name = data["scenario"]
            if not isinstance(name, str):
                raise ConfigError("scenario must be a name", "/scenario", "type")
            overrides = dict(data.get("overrides") or {})
            overrides.update({k: data[k] for k in SCENARIO_SHORTHAND if k in data})
            scenario = ScenarioId(name, overrides)
        elif any(k in data for k in SCENARIO_SHORTHAND) or "overrides" in data:
            key = next(k for k in (*SCENARIO_SHORTHAND, "overrides") if k in data)
            raise ConfigError("scenario parameters need a 'scenario'", f"/{key}", "model-xor-scenario")

        solver_data = data.get("solver", {})
        if not isinstance(solver_data, dict):
            raise ConfigError("solver settings must be an object", "/solver", "type")
        try:
            solver = SolverConfig.from_dict(solver_data)
        except TypeError as e:
            raise ConfigError(str(e), "/solver", "type") from e

        output = data.get("output")
        if output is not None and not isinstance(output, str):
            raise ConfigError("output must be a path string", "/output", "type")

        eps_R = data.get("eps_R", 1e-6)
        if isinstance(eps_R, bool) or not isinstance(eps_R, (int, float)):
            raise ConfigError(f"expected a number, got {eps_R!r}", "/eps_R", "number")

        return cls(
            scenario=scenario,
            model=data.get("model"),
            solver=solver,
            run=RunParams.from_dict(data.get("run", {})),
            output=output,
            name=data.get("name"),
            eps_R=float(eps_R),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to the JSON object accepted by from_dict()"""
        data: Dict[str, Any] = self.scenario.to_dict() if self.scenario else {"model": self.model}
        data["solver"] = self.solver.to_dict()
        data["run"] = self.run.to_dict()
        data["eps_R"] = self.eps_R
        if self.output is not None:
            data["output"] = self.output
        if self.name is not None:
            data["name"] = self.name
        return data


def load_config(path: Union[str, Path]) -> RunConfig:
    """Read and validate a run configuration file

    Raises:
        ConfigError: missing file, invalid JSON or schema/invariant violation
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"configuration file not found: {path}", "", "file-exists")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}", "", "json") from e
    return RunConfig.from_dict(data)
