"""crawlgait - periodic locomotion of crawlers with friction"""

__version__ = "0.1.0"
