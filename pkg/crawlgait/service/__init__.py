"""crawlgait Service Layer - command dispatch and sweeps"""

from crawlgait.service.run_service import Command, RunResult, RunService, run_command
from crawlgait.service.sweep_service import run_sweep

__all__ = ["Command", "RunResult", "RunService", "run_command", "run_sweep"]
