"""
Logging for crawlgait

One "crawlgait" logger tree: engine modules log through children
(crawlgait.solver, crawlgait.analysis, ...) and the CLI configures the root
once. numpy floating-point warnings are routed into the same handlers.
"""

import logging
import sys
import threading
from datetime import datetime
from pathlib import Path
from typing import Optional, Set, Tuple


ROOT = "crawlgait"

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

_once_keys: Set[Tuple[str, str]] = set()
_once_lock = threading.Lock()


def level_for(verbose: bool = False, debug: bool = False, default: str = "WARNING") -> str:
    """CLI flags to a level name: --debug wins over -v"""
    if debug:
        return "DEBUG"
    if verbose:
        return "INFO"
    return default.upper()


def _handlers(log_file: Optional[Path], console: bool):
    formatter = logging.Formatter(LOG_FORMAT, DATE_FORMAT)
    handlers = []
    if console:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(formatter)
        handlers.append(handler)
    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(log_file, encoding="utf-8")
        handler.setFormatter(formatter)
        handlers.append(handler)
    return handlers


def setup_logger(
    name: str = ROOT,
    level: str = "WARNING",
    log_file: Optional[Path] = None,
    console: bool = True
) -> logging.Logger:
    """Configure the crawlgait logger tree

    Args:
        name: Logger name (the root of the tree)
        level: Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional path to log file
        console: Whether to output to stderr

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper(), logging.WARNING))
    logger.handlers.clear()
    handlers = _handlers(log_file, console)
    for handler in handlers:
        logger.addHandler(handler)

    # RuntimeWarnings from numpy (overflow in a resolvent, ...) end up next to our own records
    logging.captureWarnings(True)
    py_warnings = logging.getLogger("py.warnings")
    py_warnings.handlers.clear()
    for handler in handlers:
        py_warnings.addHandler(handler)

    with _once_lock:
        _once_keys.clear()
    return logger


def get_logger(name: str = ROOT) -> logging.Logger:
    """Logger under the crawlgait tree; the root gets a stderr handler if unconfigured"""
    root = logging.getLogger(ROOT)
    if not root.handlers:
        root.setLevel(logging.WARNING)
        for handler in _handlers(None, console=True):
            root.addHandler(handler)
    return logging.getLogger(name)


def log_once(logger: logging.Logger, level: int, key: str, message: str) -> bool:
    """Log message the first time key is seen for this logger

    Scans and sweeps repeat the same integration many times; a condition
    such as a raised step count is reported once per configuration.
    """
    with _once_lock:
        if (logger.name, key) in _once_keys:
            logger.debug(message)
            return False
        _once_keys.add((logger.name, key))
    logger.log(level, message)
    return True


def get_log_file_path(logs_dir: Path, prefix: str = ROOT) -> Path:
    """Dated log file under logs_dir"""
    return logs_dir / f"{prefix}_{datetime.now().strftime('%Y%m%d')}.log"
