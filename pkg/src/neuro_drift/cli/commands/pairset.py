"""Paired driven/lockstep run-set command."""

from pathlib import Path

import typer
from rich.table import Table

from neuro_drift.cli.utils import cli_errors, console, load_run_config
from neuro_drift.core.errors import ConfigError
from neuro_drift.core.models import RunSetManifest, RunStatus
from neuro_drift.core.services import PairOutcome, PairsetService


def pairset(
    config_path: Path | None = typer.Option(None, "--config", "-c", help="設定ファイル"),
    pairs: int = typer.Option(10, "--pairs", "-n", help="ペア数"),
    seed: int | None = typer.Option(None, "--seed", "-s", help="基準 seed（ペア i は seed + i）"),
    out: Path | None = typer.Option(None, "--out", "-o", help="ランセットのルート"),
    workers: int = typer.Option(1, "--workers", "-w", help="並列に実行するペア数"),
    overrides: list[str] | None = typer.Option(None, "--set", help="設定の上書き（key=value）"),
) -> None:
    """driven とその lockstep の組を n 組実行（中断後の再実行は完了済みペアを飛ばす）."""
    with cli_errors():
        if pairs < 1:
            raise ConfigError("--pairs は 1 以上を指定してください")
        if workers < 1:
            raise ConfigError("--workers は 1 以上を指定してください")
        manager, config = load_run_config(config_path, overrides)
        base_seed = config.seed if seed is None else seed
        root = out or manager.get_artifact_root() / f"pairset-seed{base_seed}"

        console.print(
            f"[bold cyan]{pairs} ペアを実行します[/bold cyan] "
            f"(seed={base_seed}, steps={config.steps}, workers={workers})"
        )

        def on_pair(outcome: PairOutcome) -> None:
            if outcome.skipped:
                console.print(f"  pair {outcome.pair_index:03d}: [dim]完了済み[/dim]")
            elif outcome.lockstep_status == RunStatus.COMPLETE:
                console.print(f"  pair {outcome.pair_index:03d}: [green]✓[/green]")
            else:
                error = outcome.driven_error or outcome.lockstep_error
                console.print(f"  pair {outcome.pair_index:03d}: [red]失敗[/red] {error}")

        manifest = PairsetService.run_pairset(config, root, pairs, base_seed, workers, on_pair)

    _print_manifest(manifest)
    failed = [r for r in manifest.runs if r.status == RunStatus.FAILED]
    if failed:
        console.print(f"[yellow]{len(failed)} 件のランが失敗しました[/yellow]")
        raise typer.Exit(2)
    console.print(f"[green]✓ ランセットを書き出しました: {root}[/green]")


def _print_manifest(manifest: RunSetManifest) -> None:
    table = Table(title=f"run set ({manifest.n_pairs} pairs, base seed {manifest.base_seed})")
    table.add_column("pair", justify="right")
    table.add_column("mode")
    table.add_column("seed", justify="right")
    table.add_column("状態")
    colors = {
        RunStatus.COMPLETE: "green",
        RunStatus.FAILED: "red",
        RunStatus.RUNNING: "yellow",
        RunStatus.PENDING: "dim",
    }
    for record in manifest.runs:
        color = colors[record.status]
        table.add_row(
            str(record.pair_index),
            record.mode.value,
            str(record.seed),
            f"[{color}]{record.status.value}[/{color}]",
        )
    console.print(table)
