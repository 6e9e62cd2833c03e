"""
Settings for crawlgait

Handles:
- Data and output directories
- Solver defaults (steps per period, resolvent tolerance)
- Sweep worker count
- .env file loading and CRAWLGAIT_* environment variables
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from crawlgait.utils.logger import get_logger


logger = get_logger("crawlgait.config")

DEFAULT_STEPS_PER_PERIOD = 4096
MIN_STEPS_PER_PERIOD = 16
MAX_STEPS_PER_PERIOD = 1 << 22

DEFAULT_RESOLVENT_TOL = 1e-12
MIN_RESOLVENT_TOL = 1e-15
MAX_RESOLVENT_TOL = 1e-6

DEFAULT_WORKERS = 4
MIN_WORKERS = 1
MAX_WORKERS = 64


def get_app_dir() -> Path:
    """
    Get the data directory.

    Priority:
    1. CRAWLGAIT_DATA_DIR environment variable
    2. Current directory when it holds a .env file
    3. ~/.crawlgait/
    """
    if env_data_dir := os.environ.get("CRAWLGAIT_DATA_DIR"):
        return Path(env_data_dir)
    if (Path.cwd() / ".env").exists():
        return Path.cwd()
    return Path.home() / ".crawlgait"


def _clamp(value, min_value, max_value):
    return max(min_value, min(max_value, value))


@dataclass
class Settings:
    """Global settings for crawlgait"""

    data_dir: Path = field(default_factory=get_app_dir)
    output_dir: Optional[Path] = None

    # Logging
    log_level: str = "WARNING"
    log_file: Optional[Path] = None

    # Solver defaults
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD
    resolvent_tol: float = DEFAULT_RESOLVENT_TOL

    # Sweep
    workers: int = DEFAULT_WORKERS

    def __post_init__(self):
        """Load .env and environment variables, then clamp to legal ranges"""
        self._load_dotenv()
        self._load_from_env()
        self._normalize()

    def _load_dotenv(self):
        search_paths = [
            self.data_dir / ".env",
            Path.cwd() / ".env",
            Path(__file__).parent.parent.parent / ".env",
        ]
        for env_path in search_paths:
            if env_path.exists():
                load_dotenv(env_path)
                break

    def _load_from_env(self):
        if env_data_dir := os.environ.get("CRAWLGAIT_DATA_DIR"):
            self.data_dir = Path(env_data_dir)

        if output_dir := os.environ.get("CRAWLGAIT_OUTPUT_DIR"):
            self.output_dir = Path(output_dir)

        if log_level := os.environ.get("CRAWLGAIT_LOG_LEVEL"):
            self.log_level = log_level.upper()

        if steps := os.environ.get("CRAWLGAIT_STEPS_PER_PERIOD"):
            try:
                self.steps_per_period = int(steps)
            except ValueError:
                logger.warning(f"Ignoring CRAWLGAIT_STEPS_PER_PERIOD={steps!r}: not an integer")

        if tol := os.environ.get("CRAWLGAIT_RESOLVENT_TOL"):
            try:
                self.resolvent_tol = float(tol)
            except ValueError:
                logger.warning(f"Ignoring CRAWLGAIT_RESOLVENT_TOL={tol!r}: not a number")

        if workers := os.environ.get("CRAWLGAIT_WORKERS"):
            try:
                self.workers = int(workers)
            except ValueError:
                logger.warning(f"Ignoring CRAWLGAIT_WORKERS={workers!r}: not an integer")

    def _normalize(self):
        steps = _clamp(int(self.steps_per_period), MIN_STEPS_PER_PERIOD, MAX_STEPS_PER_PERIOD)
        if steps != self.steps_per_period:
            logger.warning(f"steps_per_period clamped from {self.steps_per_period} to {steps}")
        self.steps_per_period = steps
        self.resolvent_tol = _clamp(float(self.resolvent_tol), MIN_RESOLVENT_TOL, MAX_RESOLVENT_TOL)
        self.workers = _clamp(int(self.workers), MIN_WORKERS, MAX_WORKERS)

    @property
    def logs_dir(self) -> Path:
        """Directory for log files"""
        return self.data_dir / "logs"

    @property
    def default_output_dir(self) -> Path:
        return self.output_dir or Path.cwd() / "crawlgait-out"

    def ensure_logs_dir(self) -> Path:
        self.logs_dir.mkdir(parents=True, exist_ok=True)
        return self.logs_dir


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get global settings instance"""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def init_settings(**kwargs) -> Settings:
    """Initialize global settings with custom values"""
    global _settings
    _settings = Settings(**kwargs)
    return _settings
