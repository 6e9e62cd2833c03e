"""crawlgait CLI entry point for python -m crawlgait"""

from crawlgait.cli.main import cli

if __name__ == "__main__":
    cli()
