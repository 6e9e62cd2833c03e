"""crawlgait CLI Layer"""

from crawlgait.cli.main import cli

__all__ = ["cli"]
