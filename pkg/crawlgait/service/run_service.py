"""
Run Service for crawlgait

Dispatches one command on a validated RunConfig, writes the artifacts
and maps failures to exit codes.
"""

import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from crawlgait.core.analysis import (
    attractor_bracket,
    classify_dynamics,
    dissipativity_check,
    fixed_points,
    gamma_order_stats,
    limit_cycle,
    report_to_json,
)
from crawlgait.core.dynamics import ReducedDynamics
from crawlgait.core.models import DiscreteCrawler, reduce_model
from crawlgait.core.solver import integrate, poincare_iterates, settle
from crawlgait.data.models import RunConfig
from crawlgait.utils.exceptions import (
    ConfigError,
    CrawlGaitError,
    DissipativityError,
    NotPeriodicError,
    NumericalError,
)
from crawlgait.utils.logger import get_logger
from crawlgait.utils.output import (
    MANIFEST_FILE,
    REPORT_FILE,
    TRAJECTORY_FILE,
    trajectory_plot,
    write_json,
    write_manifest,
    write_trajectory_csv,
)


logger = get_logger("crawlgait.run")

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_DISSIPATIVITY = 2

GAMMA_FILE = "gamma.csv"


class Command(str, Enum):
    SIMULATE = "simulate"
    POINCARE = "poincare"
    ATTRACTOR = "attractor"
    FIXED_POINTS = "fixed-points"
    LIMIT_CYCLE = "limit-cycle"
    GAMMA_STATS = "gamma-stats"
    CHECK = "check"


@dataclass
class RunResult:
    """Outcome of one command"""
    command: Command
    exit_code: int = EXIT_OK
    report: Dict[str, Any] = field(default_factory=dict)
    artifacts: List[Path] = field(default_factory=list)
    error: Optional[str] = None
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return self.exit_code == EXIT_OK


class RunService:
    """Runs analysis commands for one configuration"""

    def __init__(self, cfg: RunConfig, out_dir: Optional[Path] = None):
        self.cfg = cfg
        self.out_dir = Path(out_dir or cfg.output or Path.cwd() / "crawlgait-out")
        self.logger = logger
        self._crawler = None
        self._dyn: Optional[ReducedDynamics] = None

    @property
    def crawler(self):
        if self._crawler is None:
            self._crawler = self.cfg.build_model()
        return self._crawler

    @property
    def dyn(self) -> ReducedDynamics:
        if self._dyn is None:
            self._dyn = reduce_model(self.crawler, self.cfg.eps_R)
        return self._dyn

    def _v0(self, default: float = 0.0) -> float:
        return self.cfg.run.v0 if self.cfg.run.v0 is not None else default

    def _base_report(self, command: Command) -> Dict[str, Any]:
        return {
            "command": command.value,
            "model": self.cfg.label,
            "flag": self.dyn.flag.value,
            "steps_per_period": self.cfg.solver.steps_per_period,
        }

    def _finish(self, result: RunResult, report: Dict[str, Any], plots: List[Dict[str, Any]]) -> None:
        result.report = report
        result.artifacts.append(write_json(self.out_dir / REPORT_FILE, report))
        result.artifacts.append(write_manifest(self.out_dir / MANIFEST_FILE, plots,
                                               {"command": result.command.value, "model": self.cfg.label}))

    # ------------------------------------------------------------------
    # Commands
    # ------------------------------------------------------------------

    def simulate(self, result: RunResult) -> None:
        dyn = self.dyn
        v0 = self._v0()
        horizon = self.cfg.run.periods * dyn.period
        trajectory = integrate(dyn, v0, 0.0, horizon, self.cfg.solver)
        result.artifacts.append(write_trajectory_csv(self.out_dir / TRAJECTORY_FILE, trajectory))
        report = report_to_json(
            dissipativity=dissipativity_check(dyn),
            extra={
                **self._base_report(result.command),
                "v0": v0,
                "periods": self.cfg.run.periods,
                "final_velocity": trajectory.final_velocity,
                "final_displacement": trajectory.final_displacement,
            },
        )
        self._finish(result, report, trajectory_plot(trajectory))

    def poincare(self, result: RunResult) -> None:
        dyn = self.dyn
        v0 = self._v0()
        iterates = poincare_iterates(dyn, v0, self.cfg.run.periods, self.cfg.solver)
        report = report_to_json(
            dissipativity=dissipativity_check(dyn),
            extra={**self._base_report(result.command), "v0": v0, "iterates": iterates},
        )
        self._finish(result, report, [])

    def attractor(self, result: RunResult) -> None:
        dyn = self.dyn
        bracket = attractor_bracket(dyn, self.cfg.solver, self.cfg.run.tol, self.cfg.run.kmax)
        report = report_to_json(
            attractor=bracket,
            dissipativity=dissipativity_check(dyn),
            classification=classify_dynamics(dyn),
            extra={**self._base_report(result.command), "bracket": bracket.to_dict()},
        )
        self._finish(result, report, [])

    def fixed_points(self, result: RunResult) -> None:
        dyn = self.dyn
        run = self.cfg.run
        bracket = attractor_bracket(dyn, self.cfg.solver, run.tol, run.kmax)
        points = fixed_points(dyn, bracket, run.grid_n, run.tol, self.cfg.solver)
        report = report_to_json(
            attractor=bracket,
            fixed=points,
            dissipativity=dissipativity_check(dyn),
            classification=classify_dynamics(dyn),
            extra={**self._base_report(result.command), "grid_resolution": points.grid_resolution},
        )
        self._finish(result, report, [])

    def limit_cycle(self, result: RunResult) -> None:
        dyn = self.dyn
        run = self.cfg.run
        extra: Dict[str, Any] = {}
        if run.v0 is None:
            bracket = attractor_bracket(dyn, self.cfg.solver, run.tol, run.kmax)
            v_star = bracket.alpha
            extra["v_star_source"] = "alpha"
        else:
            v_star = run.v0
        try:
            cycle = limit_cycle(dyn, v_star, self.cfg.solver, run.periodicity_tol)
        except NotPeriodicError as e:
            # Follow the orbit from v0 to the periodic regime it reaches
            self.logger.info(f"{e}; settling first")
            settled = settle(dyn, v_star, self.cfg.solver, run.settle_tol)
            if not settled.converged:
                raise NumericalError(
                    f"Orbit from v0 = {v_star:g} did not settle in {settled.periods} periods",
                    {"last_iterates": settled.iterates[-3:]},
                ) from e
            extra["settled_from"] = v_star
            extra["settle_periods"] = settled.periods
            cycle = limit_cycle(dyn, settled.limit, self.cfg.solver, run.periodicity_tol)
        result.artifacts.append(write_trajectory_csv(self.out_dir / TRAJECTORY_FILE, cycle.orbit))
        report = report_to_json(
            cycle=cycle,
            dissipativity=dissipativity_check(dyn),
            classification=classify_dynamics(dyn),
            extra={**self._base_report(result.command), **extra,
                   "v_star": cycle.v_star, "residual": cycle.residual},
        )
        self._finish(result, report, trajectory_plot(cycle.orbit))

    def gamma_stats(self, result: RunResult) -> None:
        crawler = self.crawler
        if not isinstance(crawler, DiscreteCrawler):
            raise ConfigError("gamma-stats needs a discrete model", "/model/kind", "discrete-only")
        diag = gamma_order_stats(list(crawler.shape_velocities), self.cfg.run.gamma_grid)
        path = self.out_dir / GAMMA_FILE
        path.parent.mkdir(parents=True, exist_ok=True)
        columns = ["t"] + [f"gamma_{j + 1}" for j in range(diag.gammas.shape[0])]
        table = np.column_stack([diag.times, diag.gammas.T])
        np.savetxt(path, table, delimiter=",", header=",".join(columns), comments="", fmt="%.17g")
        result.artifacts.append(path)
        report = report_to_json(extra={
            "command": result.command.value,
            "model": self.cfg.label,
            **diag.to_dict(),
        })
        plots = [{"file": GAMMA_FILE, "title": "contact order statistics", "x": "t",
                  "y": columns[1:], "x_range": [float(diag.times[0]), float(diag.times[-1])],
                  "y_range": [float(np.min(diag.gammas)), float(np.max(diag.gammas))]}]
        self._finish(result, report, plots)

    def check(self, result: RunResult) -> None:
        dyn = self.dyn
        diss = dissipativity_check(dyn)
        classification = classify_dynamics(dyn)
        bounds = dyn.bounds
        report = report_to_json(
            classification=classification,
            dissipativity=diss,
            extra={
                **self._base_report(result.command),
                "classification": classification.to_dict(),
                "bounds": {"R": bounds.R, "v_minus": bounds.v_minus, "v_plus": bounds.v_plus},
            },
        )
        self._finish(result, report, [])
        if not diss.passed:
            raise DissipativityError(
                "Dissipativity check failed", diss.integral_plus, diss.integral_minus
            )

    # ------------------------------------------------------------------

    def run(self, command: Command) -> RunResult:
        """Run a command; never raises CrawlGaitError, the exit code carries it"""
        command = Command(command)
        result = RunResult(command)
        handler = getattr(self, command.value.replace("-", "_"))
        start = time.monotonic()
        try:
            handler(result)
        except DissipativityError as e:
            result.exit_code = EXIT_DISSIPATIVITY
            result.error = f"{e} (I+ = {e.integral_plus:.6g}, I- = {e.integral_minus:.6g})"
        except NumericalError as e:
            result.exit_code = EXIT_NUMERICAL
            result.error = str(e)
            if e.diagnostics:
                self.logger.debug(f"Diagnostics: {e.diagnostics}")
        except CrawlGaitError as e:
            result.exit_code = EXIT_NUMERICAL
            result.error = str(e)
        result.elapsed = time.monotonic() - start
        if result.error:
            self.logger.error(f"{command.value} on {self.cfg.label} failed: {result.error}")
        else:
            self.logger.info(f"{command.value} on {self.cfg.label} done in {result.elapsed:.2f}s")
        return result


def run_command(cfg: RunConfig, command: Command, out_dir: Optional[Path] = None) -> RunResult:
    """Dispatch a command: exit 0 on success, 2 on dissipativity failure, 1 otherwise"""
    return RunService(cfg, out_dir).run(command)
