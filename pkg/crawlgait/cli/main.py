"""
crawlgait CLI Main Entry Point

Main command group with global options.
"""

import click

from crawlgait import __version__
from crawlgait.cli.utils import console, create_table
from crawlgait.data.config import init_settings
from crawlgait.data.scenarios import list_scenarios
from crawlgait.utils.logger import get_log_file_path, level_for, setup_logger


# Global context settings
CONTEXT_SETTINGS = dict(
    help_option_names=['-h', '--help'],
    max_content_width=120,
)


@click.group(context_settings=CONTEXT_SETTINGS)
@click.version_option(__version__, '-V', '--version', prog_name='crawlgait')
@click.option(
    '-v', '--verbose',
    is_flag=True,
    help='Enable verbose output'
)
@click.option(
    '--debug',
    is_flag=True,
    help='Enable debug mode'
)
@click.option(
    '--log-file',
    is_flag=True,
    help='Also write the log to <data dir>/logs'
)
@click.pass_context
def cli(ctx, verbose: bool, debug: bool, log_file: bool):
    """
    crawlgait - periodic gaits of crawlers with friction

    Simulates the barycentre velocity of a crawler whose shape changes
    periodically, and analyses its period map: attractor, fixed points,
    limit cycles and net displacement per period.

    \b
    Examples:
      crawlgait scenarios                              # List built-in models
      crawlgait simulate -s ex-dry --v0 3              # One period from v0 = 3
      crawlgait attractor -s ex-strib                  # Attractor bracket
      crawlgait limit-cycle -s ex-comp --v0 0.125      # Net displacement
      crawlgait fixed-points -c model.json -o out/     # From a config file
      crawlgait sweep check -s all                     # Every scenario
    """
    ctx.ensure_object(dict)

    settings = init_settings()
    settings.log_level = level_for(verbose, debug, settings.log_level)

    log_path = get_log_file_path(settings.ensure_logs_dir()) if log_file else None
    setup_logger("crawlgait", settings.log_level, log_path)

    ctx.obj["settings"] = settings
    ctx.obj["verbose"] = verbose
    ctx.obj["debug"] = debug


# Import and register subcommands
from crawlgait.cli.commands import (  # noqa: E402
    attractor,
    check,
    fixed_points,
    gamma_stats,
    limit_cycle,
    poincare,
    simulate,
)
from crawlgait.cli.sweep import sweep  # noqa: E402

cli.add_command(simulate)
cli.add_command(poincare)
cli.add_command(attractor)
cli.add_command(fixed_points)
cli.add_command(limit_cycle)
cli.add_command(gamma_stats)
cli.add_command(check)
cli.add_command(sweep)


@cli.command()
def scenarios():
    """List the built-in scenarios and their parameters"""
    table = create_table("Scenarios", ["name", "description", "parameters", "expected"])
    for s in list_scenarios():
        params = ", ".join(
            f"{k}={v:g}" if k in s.defaults else k for k, v in
            [(k, s.defaults.get(k, 0.0)) for k in s.parameters]
        )
        table.add_row(f"[cyan]{s.name}[/cyan]", s.description, params, f"[dim]{s.expected}[/dim]")
    console.print(table)


if __name__ == '__main__':
    cli()
