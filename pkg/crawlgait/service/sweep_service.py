"""
Sweep Service for crawlgait

Fans independent runs out over a worker pool. Every run owns its model,
its trajectory state and its output directory <out>/<run-name>/.
"""

import asyncio
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Union

from crawlgait.data.models import RunConfig
from crawlgait.service.run_service import EXIT_OK, Command, RunResult, run_command
from crawlgait.utils.logger import get_logger


logger = get_logger("crawlgait.sweep")

ProgressCallback = Callable[[int, int, RunResult], None]


@dataclass
class SweepSummary:
    results: List[RunResult] = field(default_factory=list)
    names: List[str] = field(default_factory=list)

    @property
    def failed(self) -> int:
        return sum(1 for r in self.results if r.exit_code != EXIT_OK)

    @property
    def exit_code(self) -> int:
        """Worst exit code of the sweep (2 ranks above 1)"""
        return max((r.exit_code for r in self.results), default=EXIT_OK)


def unique_names(configs: Sequence[RunConfig]) -> List[str]:
    """Run directory names, suffixed when labels repeat"""
    seen = {}
    names = []
    for cfg in configs:
        label = cfg.label
        count = seen.get(label, 0)
        seen[label] = count + 1
        names.append(label if count == 0 else f"{label}-{count + 1}")
    return names


async def run_sweep(
    configs: Sequence[RunConfig],
    command: Union[Command, str],
    out_dir: Path,
    workers: int = 4,
    use_processes: bool = True,
    progress_callback: Optional[ProgressCallback] = None,
) -> SweepSummary:
    """Run one command on every configuration, at most `workers` at a time"""
    command = Command(command)
    out_dir = Path(out_dir)
    names = unique_names(configs)
    summary = SweepSummary(results=[None] * len(configs), names=names)
    semaphore = asyncio.Semaphore(max(1, int(workers)))
    done = 0
    progress_lock = asyncio.Lock()
    loop = asyncio.get_running_loop()

    executor: Executor
    if use_processes:
        executor = ProcessPoolExecutor(max_workers=max(1, int(workers)))
    else:
        executor = ThreadPoolExecutor(max_workers=max(1, int(workers)))

    async def run_one(index: int, cfg: RunConfig) -> None:
        nonlocal done
        async with semaphore:
            target = out_dir / names[index]
            logger.debug(f"Sweep run {names[index]} -> {target}")
            result = await loop.run_in_executor(executor, run_command, cfg, command, target)
        summary.results[index] = result
        async with progress_lock:
            done += 1
            if progress_callback:
                progress_callback(done, len(configs), result)

    try:
        await asyncio.gather(*(run_one(i, cfg) for i, cfg in enumerate(configs)))
    finally:
        executor.shutdown(wait=True)

    logger.info(f"Sweep {command.value}: {len(configs)} runs, {summary.failed} failed")
    return summary
