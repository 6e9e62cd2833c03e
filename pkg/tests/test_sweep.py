import pytest

from crawlgait.data.models import RunConfig, ScenarioId
from crawlgait.service.run_service import EXIT_DISSIPATIVITY, EXIT_OK, Command
from crawlgait.service.sweep_service import run_sweep, unique_names
from crawlgait.utils.output import REPORT_FILE


def make(name, **overrides):
    return RunConfig(scenario=ScenarioId(name, overrides))


def test_unique_names():
    configs = [make("ex-dry"), make("ex-dry"), make("ex-comp"), make("ex-dry")]
    assert unique_names(configs) == ["ex-dry", "ex-dry-2", "ex-comp", "ex-dry-3"]


def test_named_runs_keep_their_name():
    cfg = make("ex-dry").replace(name="flat")
    assert unique_names([cfg, make("ex-dry")]) == ["flat", "ex-dry"]


@pytest.mark.asyncio
async def test_sweep_isolates_runs(tmp_path):
    configs = [make("ex-dry"), make("ex-dry", alpha=0.5), make("slope-dry", load=3.0)]
    seen = []
    summary = await run_sweep(
        configs, Command.CHECK, tmp_path, workers=2, use_processes=False,
        progress_callback=lambda done, total, result: seen.append((done, total)),
    )
    assert summary.names == ["ex-dry", "ex-dry-2", "slope-dry"]
    assert [r.exit_code for r in summary.results] == [EXIT_OK, EXIT_OK, EXIT_DISSIPATIVITY]
    assert summary.failed == 1
    assert summary.exit_code == EXIT_DISSIPATIVITY
    assert sorted(seen) == [(1, 3), (2, 3), (3, 3)]
    for name in summary.names:
        assert (tmp_path / name / REPORT_FILE).exists()


@pytest.mark.asyncio
async def test_empty_sweep(tmp_path):
    summary = await run_sweep([], "check", tmp_path, use_processes=False)
    assert summary.results == []
    assert summary.exit_code == EXIT_OK
