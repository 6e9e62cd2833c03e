"""
CLI Utility Functions for crawlgait
"""

import asyncio
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn
from rich.table import Table

from crawlgait.core.solver import SolverConfig
from crawlgait.data.config import get_settings
from crawlgait.data.models import RunConfig, RunParams, ScenarioId, load_config
from crawlgait.service.run_service import RunResult
from crawlgait.utils.exceptions import ConfigError


# Rich console for formatted output
console = Console()
error_console = Console(stderr=True)


def async_command(f: Callable) -> Callable:
    """Decorator to run async click commands"""
    @wraps(f)
    def wrapper(*args, **kwargs):
        return asyncio.run(f(*args, **kwargs))
    return wrapper


def run_options(f: Callable) -> Callable:
    """Options shared by every analysis command"""
    options = [
        click.option('-c', '--config', 'config_path', type=click.Path(dir_okay=False),
                     help='Run configuration JSON file', metavar='FILE'),
        click.option('-s', '--scenario', help='Registry scenario (see: crawlgait scenarios)',
                     metavar='NAME'),
        click.option('-p', '--param', 'params', multiple=True,
                     help='Scenario override, e.g. -p alpha=0.5 (repeatable)', metavar='KEY=VALUE'),
        click.option('--v0', type=float, help='Initial velocity'),
        click.option('--periods', type=click.IntRange(min=1), help='Number of periods'),
        click.option('--steps', type=click.IntRange(min=16), help='Time steps per period'),
        click.option('-o', '--out', 'out_dir', type=click.Path(file_okay=False),
                     help='Output directory', metavar='DIR'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def parse_params(params) -> Dict[str, float]:
    result = {}
    for item in params:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise click.BadParameter(f"expected KEY=VALUE, got {item!r}", param_hint="--param")
        try:
            result[key.strip()] = float(value)
        except ValueError:
            raise click.BadParameter(f"{key}: {value!r} is not a number", param_hint="--param")
    return result


def build_run_config(
    config_path: Optional[str],
    scenario: Optional[str],
    params=(),
    v0: Optional[float] = None,
    periods: Optional[int] = None,
    steps: Optional[int] = None,
    out_dir: Optional[str] = None,
) -> RunConfig:
    """Merge a config file, a scenario name and command-line overrides

    Raises:
        ConfigError: invalid or conflicting inputs
    """
    settings = get_settings()
    overrides = parse_params(params)
    if config_path:
        cfg = load_config(config_path)
        if scenario:
            cfg = cfg.replace(scenario=ScenarioId(scenario, overrides), model=None)
        elif overrides:
            if cfg.scenario is None:
                raise ConfigError("--param needs a scenario", "/overrides", "model-xor-scenario")
            cfg = cfg.replace(scenario=ScenarioId(cfg.scenario.name, {**cfg.scenario.overrides, **overrides}))
    elif scenario:
        solver = SolverConfig(steps_per_period=settings.steps_per_period,
                              resolvent_tol=settings.resolvent_tol)
        cfg = RunConfig(scenario=ScenarioId(scenario, overrides), solver=solver)
    else:
        raise ConfigError("give --config or --scenario", "", "model-xor-scenario")

    run_changes: Dict[str, Any] = {}
    if v0 is not None:
        run_changes["v0"] = v0
    if periods is not None:
        run_changes["periods"] = periods
    if run_changes:
        cfg = cfg.replace(run=RunParams.from_dict({**cfg.run.to_dict(), **run_changes}))
    if steps is not None:
        cfg = cfg.replace(solver=SolverConfig.from_dict({**cfg.solver.to_dict(), "steps_per_period": steps}))
    if out_dir is not None:
        cfg = cfg.replace(output=out_dir)
    elif cfg.output is None:
        cfg = cfg.replace(output=str(settings.default_output_dir))
    return cfg


def print_success(message: str) -> None:
    """Print success message"""
    console.print(f"[green]✓[/green] {message}")


def print_error(message: str) -> None:
    """Print error message"""
    error_console.print(f"[red]✗[/red] {message}")


def print_warning(message: str) -> None:
    """Print warning message"""
    error_console.print(f"[yellow]![/yellow] {message}")


def create_table(title: str, columns: list) -> Table:
    """Create a Rich table with consistent styling"""
    table = Table(title=title, show_header=True, header_style="bold cyan")
    for col in columns:
        if isinstance(col, tuple):
            table.add_column(col[0], **col[1])
        else:
            table.add_column(col)
    return table


def create_progress() -> Progress:
    """Create a Rich progress bar"""
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=console,
    )


def fmt(value: Optional[float], digits: int = 9) -> str:
    if value is None:
        return "-"
    return f"{value:.{digits}g}"


def report_result(result: RunResult) -> None:
    """Print the outcome of a run and exit with its code"""
    if result.error:
        print_error(result.error)
    for path in result.artifacts:
        console.print(f"  [dim]{Path(path)}[/dim]")
    ctx = click.get_current_context()
    ctx.exit(result.exit_code)
