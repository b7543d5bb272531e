"""Shared console, config loading and error-to-exit-code mapping."""

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import questionary
import typer
from rich.console import Console
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    TextColumn,
    TimeElapsedColumn,
    TimeRemainingColumn,
)

from neuro_drift.core.config import ConfigManager, RunConfig
from neuro_drift.core.errors import NeuroDriftError

console = Console()
logger = logging.getLogger(__name__)


def load_run_config(
    config_path: Path | None, overrides: list[str] | None
) -> tuple[ConfigManager, RunConfig]:
    """設定ファイルと ``--set`` の上書きから設定を作る."""
    manager = ConfigManager(config_path)
    config = manager.apply_overrides(overrides) if overrides else manager.load()
    return manager, config


@contextmanager
def cli_errors() -> Iterator[None]:
    """NeuroDriftError を赤字で表示し、対応する終了コードで終了."""
    try:
        yield
    except NeuroDriftError as e:
        console.print(f"[red]エラー: {e}[/red]")
        logger.debug("詳細", exc_info=True)
        raise typer.Exit(int(e.exit_code)) from e
    except KeyboardInterrupt:
        console.print("\n[yellow]中断されました[/yellow]")
        raise typer.Exit(2) from None


def confirm_overwrite(path: Path, force: bool) -> bool:
    """既存の出力先を上書きしてよいか確認（端末でなければ --force が必要）."""
    if force or not path.exists() or not any(path.iterdir()):
        return True
    if not console.is_terminal:
        console.print(
            f"[red]出力先 {path} は既に存在します。上書きするには --force を指定してください[/red]"
        )
        return False
    answer = questionary.confirm(f"{path} は既に存在します。上書きしますか？", default=False).ask()
    return bool(answer)


def progress_bar() -> Progress:
    """長いランの進捗表示."""
    return Progress(
        TextColumn("[bold cyan]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TextColumn("pop={task.fields[population]}"),
        TimeElapsedColumn(),
        TimeRemainingColumn(),
        console=console,
        transient=True,
    )
