"""Run-set analysis command."""

from pathlib import Path

import typer
from rich.table import Table

from neuro_drift.cli.utils import cli_errors, console
from neuro_drift.core.config import NeuronFilter
from neuro_drift.core.errors import ConfigError
from neuro_drift.core.services import ReportService, RunSetReport


def analyze(
    root: Path = typer.Argument(..., help="ランセットのルート（manifest.db のあるディレクトリ）"),
    neurons: NeuronFilter | None = typer.Option(
        None, "--neurons", help="複雑性に使うニューロン（all / input / processing）"
    ),
    bin_width: int | None = typer.Option(None, "--bin-width", help="死亡ビンの幅（ステップ）"),
    tails: str | None = typer.Option(None, "--tails", help="t 検定の臨界値（one / two）"),
    alpha: float | None = typer.Option(None, "--alpha", help="有意水準"),
    out: Path | None = typer.Option(None, "--out", "-o", help="出力先（既定は ROOT/analysis）"),
    workers: int = typer.Option(1, "--workers", "-w", help="複雑性計算の並列数"),
) -> None:
    """ランセットを解析し、CSV と gnuplot スクリプトを書き出す."""
    with cli_errors():
        if tails is not None and tails not in ("one", "two"):
            raise ConfigError(f"--tails は one か two です: {tails}")
        if bin_width is not None and bin_width < 1:
            raise ConfigError("--bin-width は 1 以上を指定してください")
        if alpha is not None and not 0.0 < alpha < 1.0:
            raise ConfigError("--alpha は 0 と 1 の間で指定してください")

        with console.status("[bold cyan]解析中...[/bold cyan]"):
            report = ReportService.analyze(
                root,
                out_dir=out,
                neuron_filter=neurons,
                bin_width=bin_width,
                alpha=alpha,
                tails=tails,
                workers=workers,
            )

    _print_report(report)


def _print_report(report: RunSetReport) -> None:
    for run_id, reason in sorted(report.missing.items()):
        console.print(f"[yellow]除外: {run_id}: {reason}[/yellow]")

    series = report.t_series
    if series is not None:
        table = Table(title=f"paired t ({report.neuron_filter.value} neurons, {series.tails}-tailed)")
        table.add_column("bin end", justify="right")
        table.add_column("t", justify="right")
        table.add_column("df", justify="right")
        table.add_column("T*", justify="right")
        table.add_column("有意")
        for index, end in enumerate(series.bin_ends):
            t, df, critical = series.t[index], series.df[index], series.t_critical[index]
            significant = series.significant(index)
            table.add_row(
                str(end),
                "-" if t is None else f"{t:.3f}",
                "-" if df is None else str(df),
                "-" if critical is None else f"{critical:.3f}",
                "[green]✓[/green]" if significant else "",
            )
        console.print(table)
        hits = ReportService.significant_bins(series)
        if hits:
            console.print(f"T* を超えたビン: {', '.join(str(end) for end in hits)}")
        else:
            console.print("[dim]T* を超えたビンはありません[/dim]")

    if report.inconsistent_pairs:
        console.print(f"[yellow]整合性エラーで除外: {len(report.inconsistent_pairs)} 組[/yellow]")

    console.print(f"[green]✓ {len(report.files)} ファイルを書き出しました: {report.out_dir}[/green]")
