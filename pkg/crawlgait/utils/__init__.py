"""crawlgait Utils - logging, exceptions and artifact writers"""

from crawlgait.utils.logger import setup_logger, get_logger
from crawlgait.utils.exceptions import (
    CrawlGaitError,
    ConfigError,
    DissipativityError,
    ModelError,
    NumericalError,
)

__all__ = [
    "setup_logger",
    "get_logger",
    "CrawlGaitError",
    "ConfigError",
    "DissipativityError",
    "ModelError",
    "NumericalError",
]
