"""Shared rich console and logging setup."""
import logging

from rich.console import Console
from rich.logging import RichHandler

console = Console()


def setup_logging(verbose: bool = False) -> None:
    """Route library logging through rich.

    Args:
        verbose: DEBUG level when True, WARNING otherwise
    """
    level = logging.DEBUG if verbose else logging.WARNING
    logger = logging.getLogger("dualgap")
    logger.handlers.clear()
    handler = RichHandler(console=console, show_path=False, rich_tracebacks=True)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False
