"""Logging setup backed by rich."""

import logging

from rich.console import Console
from rich.logging import RichHandler

_LOGGER_NAME = "neuro_drift"


def setup_logging(verbose: bool = False, console: Console | None = None) -> None:
    """パッケージロガーに RichHandler を設定."""
    logger = logging.getLogger(_LOGGER_NAME)
    logger.handlers.clear()
    handler = RichHandler(
        console=console or Console(stderr=True),
        show_path=False,
        rich_tracebacks=True,
    )
    handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    logger.propagate = False
