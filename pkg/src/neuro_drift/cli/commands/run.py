"""Single-run commands: run and fitness."""

from pathlib import Path

import typer
from rich.table import Table

from neuro_drift.cli.utils import (
    cli_errors,
    confirm_overwrite,
    console,
    load_run_config,
    progress_bar,
)
from neuro_drift.core.config import RunConfig, RunMode
from neuro_drift.core.errors import ConfigError
from neuro_drift.core.models import RunSummary
from neuro_drift.core.services import RunService

LOCKSTEP_NEEDS_SCHEDULE = "lockstep requires a driven event log"

ConfigOption = typer.Option(None, "--config", "-c", help="設定ファイル（key = value 形式）")
SetOption = typer.Option(None, "--set", help="設定の上書き（key=value、複数指定可）")
OutOption = typer.Option(None, "--out", "-o", help="出力先ディレクトリ")
ForceOption = typer.Option(False, "--force", "-f", help="確認せずに上書き")


def run(
    config_path: Path | None = ConfigOption,
    seed: int | None = typer.Option(None, "--seed", "-s", help="乱数 seed"),
    mode: RunMode | None = typer.Option(None, "--mode", "-m", help="実行モード"),
    schedule: Path | None = typer.Option(
        None, "--schedule", help="lockstep で再生する driven ランの events.csv"
    ),
    out: Path | None = OutOption,
    overrides: list[str] | None = SetOption,
    force: bool = ForceOption,
) -> None:
    """シミュレーションを1本実行."""
    with cli_errors():
        manager, config = load_run_config(config_path, overrides)
        mode = mode or config.mode
        if mode == RunMode.LOCKSTEP and schedule is None:
            raise ConfigError(f"{LOCKSTEP_NEEDS_SCHEDULE}（--schedule で指定してください）")
        seed = config.seed if seed is None else seed
        out_dir = out or RunService.default_run_dir(manager.get_artifact_root(), mode, seed)
        summary = _execute(config, mode, seed, schedule, out_dir, force)
    _print_summary(summary, out_dir)


def fitness(
    config_path: Path | None = ConfigOption,
    seed: int | None = typer.Option(None, "--seed", "-s", help="乱数 seed"),
    out: Path | None = OutOption,
    overrides: list[str] | None = SetOption,
    force: bool = ForceOption,
) -> None:
    """複雑性を適応度とする置換つきのランを実行."""
    with cli_errors():
        manager, config = load_run_config(config_path, overrides)
        seed = config.seed if seed is None else seed
        mode = RunMode.COMPLEXITY_FITNESS
        out_dir = out or RunService.default_run_dir(manager.get_artifact_root(), mode, seed)
        summary = _execute(config, mode, seed, None, out_dir, force)
    _print_summary(summary, out_dir)


def _execute(
    config: RunConfig,
    mode: RunMode,
    seed: int,
    schedule: Path | None,
    out_dir: Path,
    force: bool,
) -> RunSummary:
    if not confirm_overwrite(out_dir, force):
        console.print("[yellow]キャンセルされました[/yellow]")
        raise typer.Exit(1)

    console.print(
        f"[bold cyan]{mode.value} ランを開始します[/bold cyan] (seed={seed}, steps={config.steps})"
    )
    with progress_bar() as progress:
        task = progress.add_task(mode.value, total=config.steps, population="-")

        def on_step(step: int, population: int) -> None:
            progress.update(task, completed=step, population=population)

        if mode == RunMode.LOCKSTEP:
            if schedule is None:
                raise ConfigError(LOCKSTEP_NEEDS_SCHEDULE)
            return RunService.run_lockstep(config, seed, schedule, out_dir, on_step)
        if mode == RunMode.COMPLEXITY_FITNESS:
            return RunService.run_fitness(config, seed, out_dir, on_step)
        return RunService.run_driven(config, seed, out_dir, on_step)


def _print_summary(summary: RunSummary, out_dir: Path) -> None:
    table = Table(title=f"{summary.mode.value} seed={summary.seed}")
    table.add_column("項目", style="cyan")
    table.add_column("値", justify="right")
    table.add_row("ステップ", str(summary.steps))
    table.add_row(
        "個体数（初期 → 最終）", f"{summary.initial_population} → {summary.final_population}"
    )
    table.add_row("誕生", str(summary.births))
    for cause, count in sorted(summary.deaths.items()):
        table.add_row(f"死亡 ({cause})", str(count))
    if summary.forced_births or summary.forced_deaths:
        table.add_row("強制誕生 / 強制死亡", f"{summary.forced_births} / {summary.forced_deaths}")
    if summary.replacements:
        table.add_row("置換", str(summary.replacements))
    table.add_row("トレース", str(summary.traces_written))
    if summary.extinct_at is not None:
        table.add_row("絶滅", f"step {summary.extinct_at}")
    console.print(table)
    console.print(f"[green]✓ アーティファクトを書き出しました: {out_dir}[/green]")
