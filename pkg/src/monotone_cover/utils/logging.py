"""Rich-backed logging setup for the CLI."""

import logging

from rich.console import Console
from rich.logging import RichHandler

PACKAGE_LOGGER = "monotone_cover"


def configure_logging(level: str = "WARNING", console: Console | None = None) -> None:
    """Attach a RichHandler to the package logger.

    Calling it again only updates the level.

    Args:
        level: Logging level name
        console: Console to write to (defaults to stderr)
    """
    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.setLevel(level.upper())
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(
            console=console or Console(stderr=True),
            show_path=False,
            rich_tracebacks=True,
        )
        handler.setFormatter(logging.Formatter("%(message)s"))
        logger.addHandler(handler)
    logger.propagate = False
