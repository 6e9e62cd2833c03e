"""crawlgait Data Layer - settings, run configurations and scenarios"""

from crawlgait.data.config import Settings
from crawlgait.data.models import RunConfig, RunParams, ScenarioId, load_config

__all__ = ["Settings", "RunConfig", "RunParams", "ScenarioId", "load_config"]
