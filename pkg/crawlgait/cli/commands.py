"""
crawlgait Analysis Commands

simulate, poincare, attractor, fixed-points, limit-cycle, gamma-stats, check
"""

from typing import Any, Callable, Dict, Optional

import click

from crawlgait.cli.utils import (
    build_run_config,
    console,
    create_table,
    fmt,
    print_error,
    print_success,
    report_result,
    run_options,
)
from crawlgait.data.models import RunConfig, RunParams
from crawlgait.service.run_service import EXIT_NUMERICAL, Command, RunResult, run_command
from crawlgait.utils.exceptions import CrawlGaitError


def _prepare(run_params: Optional[Dict[str, Any]] = None, **options) -> RunConfig:
    try:
        cfg = build_run_config(**options)
        if run_params:
            cfg = cfg.replace(run=RunParams.from_dict({**cfg.run.to_dict(), **run_params}))
        return cfg
    except CrawlGaitError as e:
        print_error(str(e))
        click.get_current_context().exit(EXIT_NUMERICAL)


def _execute(command: Command, cfg: RunConfig, show: Callable[[RunResult], None]) -> None:
    with console.status(f"[bold]{command.value}[/bold] on {cfg.label}..."):
        result = run_command(cfg, command)
    if result.ok:
        show(result)
        print_success(f"{command.value} finished in {result.elapsed:.2f}s")
    report_result(result)


def _show_dissipativity(report: Dict[str, Any]) -> None:
    diss = report.get("dissipativity")
    if diss:
        state = "[green]pass[/green]" if diss["pass"] else "[red]fail[/red]"
        console.print(f"  dissipativity: {state}  I+ = {fmt(diss['I_plus'], 6)}  I- = {fmt(diss['I_minus'], 6)}")


@click.command('simulate')
@run_options
def simulate(**options):
    """Integrate from v0 over a number of periods (writes trajectory.csv)"""
    cfg = _prepare(**options)

    def show(result: RunResult):
        r = result.report
        console.print(f"  v({r['periods']}T) = [cyan]{fmt(r['final_velocity'], 12)}[/cyan]"
                      f"  x = {fmt(r['final_displacement'], 12)}")
        _show_dissipativity(r)

    _execute(Command.SIMULATE, cfg, show)


@click.command('poincare')
@run_options
def poincare(**options):
    """Period-map iterates Phi_T^k(v0), k = 1..periods"""
    cfg = _prepare(**options)

    def show(result: RunResult):
        table = create_table("Period map", [("k", {"justify": "right"}), "v"])
        for k, v in enumerate(result.report["iterates"], start=1):
            table.add_row(str(k), fmt(v, 12))
        console.print(table)

    _execute(Command.POINCARE, cfg, show)


@click.command('attractor')
@run_options
@click.option('--tol', type=float, default=1e-6, show_default=True, help='Convergence tolerance')
def attractor(tol: float, **options):
    """Attractor bracket [alpha, beta] of the period map"""
    cfg = _prepare({"tol": tol}, **options)

    def show(result: RunResult):
        r = result.report
        console.print(f"  K = [[cyan]{fmt(r['alpha'])}[/cyan], [cyan]{fmt(r['beta'])}[/cyan]]"
                      f"  ({r['bracket']['iterations']} iterations)")
        console.print(f"  theorem: {r['theorem']}")
        _show_dissipativity(r)

    _execute(Command.ATTRACTOR, cfg, show)


@click.command('fixed-points')
@run_options
@click.option('--tol', type=float, default=1e-6, show_default=True, help='Fixed-point tolerance')
@click.option('--grid', 'grid_n', type=click.IntRange(min=2), default=512, show_default=True,
              help='Scan points on the attractor bracket')
def fixed_points(tol: float, grid_n: int, **options):
    """Fixed points of the period map and their stability"""
    cfg = _prepare({"tol": tol, "grid_n": grid_n}, **options)

    def show(result: RunResult):
        r = result.report
        table = create_table("Fixed points", [("v", {"justify": "right"}), "class"])
        for p in r["fixed_points"]:
            table.add_row(fmt(p["v"]), p["class"])
        for a, b in r["plateaus"]:
            table.add_row(f"[{fmt(a)}, {fmt(b)}]", "plateau")
        console.print(table)
        console.print(f"  [dim]resolution {fmt(r['grid_resolution'], 3)}[/dim]")

    _execute(Command.FIXED_POINTS, cfg, show)


@click.command('limit-cycle')
@run_options
def limit_cycle(**options):
    """Periodic orbit through v0 (settled first if needed) and its net displacement"""
    cfg = _prepare(**options)

    def show(result: RunResult):
        r = result.report
        console.print(f"  v* = {fmt(r['v_star'], 12)}  gamma = [cyan]{fmt(r['gamma'], 12)}[/cyan]"
                      f"  average velocity = {fmt(r['avg_velocity'], 12)}")
        if "settled_from" in r:
            console.print(f"  [dim]settled from v0 = {fmt(r['settled_from'])} "
                          f"in {r['settle_periods']} periods[/dim]")

    _execute(Command.LIMIT_CYCLE, cfg, show)


@click.command('gamma-stats')
@run_options
def gamma_stats(**options):
    """Order statistics of the contact abscissae -w_i(t)"""
    cfg = _prepare(**options)

    def show(result: RunResult):
        r = result.report
        table = create_table("Adjacent gaps", [("j", {"justify": "right"}), "min gap", "at t"])
        for j, (gap, t) in enumerate(zip(r["min_gaps"], r["gap_times"]), start=1):
            table.add_row(f"{j}/{j + 1}", fmt(gap), fmt(t, 6))
        console.print(table)

    _execute(Command.GAMMA_STATS, cfg, show)


@click.command('check')
@run_options
def check(**options):
    """Dissipativity check and structural classification"""
    cfg = _prepare(**options)

    def show(result: RunResult):
        r = result.report
        c = r["classification"]
        console.print(f"  flag: [cyan]{c['flag']}[/cyan]  theorem: {c['theorem']}")
        console.print(f"  uniqueness predicted: {'yes' if c['uniqueness_predicted'] else 'no'}")
        for reason in c["reasons"]:
            console.print(f"    [dim]- {reason}[/dim]")
        _show_dissipativity(r)
        b = r["bounds"]
        console.print(f"  absorbing box: [{fmt(b['v_minus'], 6)}, {fmt(b['v_plus'], 6)}]")

    _execute(Command.CHECK, cfg, show)
