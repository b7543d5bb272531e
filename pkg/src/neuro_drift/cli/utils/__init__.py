"""CLI utilities module"""

from .console import (
    cli_errors,
    confirm_overwrite,
    console,
    load_run_config,
    progress_bar,
)

__all__ = ["cli_errors", "confirm_overwrite", "console", "load_run_config", "progress_bar"]
