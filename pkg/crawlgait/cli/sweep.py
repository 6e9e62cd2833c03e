"""
crawlgait Sweep Command

Run one analysis command over several scenarios or config files.
"""

from pathlib import Path
from typing import List, Tuple

import click

from crawlgait.cli.utils import (
    async_command,
    build_run_config,
    console,
    create_progress,
    create_table,
    print_error,
    print_success,
    print_warning,
)
from crawlgait.data.config import get_settings
from crawlgait.data.models import RunConfig
from crawlgait.data.scenarios import SCENARIOS
from crawlgait.service.run_service import EXIT_NUMERICAL, Command
from crawlgait.service.sweep_service import run_sweep
from crawlgait.utils.exceptions import CrawlGaitError


@click.command('sweep')
@click.argument('command', type=click.Choice([c.value for c in Command]))
@click.option('-c', '--config', 'configs', multiple=True, type=click.Path(dir_okay=False),
              help='Run configuration file (repeatable)', metavar='FILE')
@click.option('-s', '--scenario', 'scenarios', multiple=True,
              help='Registry scenario (repeatable); "all" runs the whole registry', metavar='NAME')
@click.option('--v0', type=float, help='Initial velocity for every run')
@click.option('--periods', type=click.IntRange(min=1), help='Number of periods')
@click.option('--steps', type=click.IntRange(min=16), help='Time steps per period')
@click.option('-o', '--out', 'out_dir', type=click.Path(file_okay=False), help='Output directory', metavar='DIR')
@click.option('-w', '--workers', type=click.IntRange(min=1), help='Parallel workers')
@click.option('--threads', is_flag=True, help='Use threads instead of processes')
@async_command
async def sweep(
    command: str,
    configs: Tuple[str],
    scenarios: Tuple[str],
    v0, periods, steps, out_dir, workers, threads: bool,
):
    """
    Run COMMAND over several models; each run writes to <out>/<run-name>/

    \b
    Examples:
      crawlgait sweep attractor -s all -w 8
      crawlgait sweep check -c a.json -c b.json
    """
    settings = get_settings()
    names = list(SCENARIOS) if "all" in scenarios else list(scenarios)
    common = dict(v0=v0, periods=periods, steps=steps, out_dir=None)
    try:
        runs: List[RunConfig] = [build_run_config(path, None, **common) for path in configs]
        runs += [build_run_config(None, name, **common) for name in names]
    except CrawlGaitError as e:
        print_error(str(e))
        raise click.exceptions.Exit(EXIT_NUMERICAL)
    if not runs:
        print_warning("Nothing to run: give --config or --scenario")
        return

    target = Path(out_dir) if out_dir else settings.default_output_dir
    with create_progress() as progress:
        task = progress.add_task(f"{command} x {len(runs)}", total=len(runs))

        def on_progress(done, total, result):
            progress.update(task, completed=done)

        summary = await run_sweep(
            runs, command, target,
            workers=workers or settings.workers,
            use_processes=not threads,
            progress_callback=on_progress,
        )

    table = create_table(f"Sweep: {command}", ["run", ("exit", {"justify": "right"}), "time", "note"])
    for name, result in zip(summary.names, summary.results):
        style = "green" if result.ok else "red"
        table.add_row(name, f"[{style}]{result.exit_code}[/{style}]",
                      f"{result.elapsed:.2f}s", result.error or "")
    console.print(table)

    if summary.failed:
        print_error(f"{summary.failed} of {len(runs)} runs failed")
        raise click.exceptions.Exit(summary.exit_code)
    print_success(f"{len(runs)} runs written to {target}")
