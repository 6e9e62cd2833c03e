import logging

import pytest

from crawlgait.utils.logger import get_log_file_path, get_logger, level_for, log_once, setup_logger


@pytest.mark.parametrize("verbose, debug, expected", [
    (False, False, "WARNING"),
    (True, False, "INFO"),
    (True, True, "DEBUG"),
    (False, True, "DEBUG"),
])
def test_level_for(verbose, debug, expected):
    assert level_for(verbose, debug) == expected


def test_level_for_keeps_configured_default():
    assert level_for(default="error") == "ERROR"


def test_log_once(caplog):
    logger = get_logger("crawlgait.test_once")
    with caplog.at_level(logging.INFO, logger="crawlgait"):
        assert log_once(logger, logging.WARNING, "k", "first")
        assert not log_once(logger, logging.WARNING, "k", "second")
        assert log_once(logger, logging.WARNING, "other", "third")
    warnings = [r.getMessage() for r in caplog.records if r.levelno == logging.WARNING]
    assert warnings == ["first", "third"]


def test_file_handler(tmp_path):
    path = get_log_file_path(tmp_path / "logs")
    assert path.name.startswith("crawlgait_") and path.suffix == ".log"
    logger = setup_logger("crawlgait", "INFO", path, console=False)
    get_logger("crawlgait.solver").info("steps raised")
    for handler in logger.handlers:
        handler.flush()
    assert "[INFO] crawlgait.solver: steps raised" in path.read_text()
    for handler in logger.handlers:
        handler.close()
    logger.handlers.clear()
    logging.getLogger("py.warnings").handlers.clear()
