"""Main CLI entry point for neuro-drift"""

import sys

import click
import typer

from neuro_drift.cli.commands.analyze import analyze
from neuro_drift.cli.commands.pairset import pairset
from neuro_drift.cli.commands.run import fitness, run
from neuro_drift.cli.utils import console
from neuro_drift.core.errors import ExitCode
from neuro_drift.core.logging import setup_logging

app = typer.Typer(
    name="neuro-drift",
    help="駆動型/受動型の神経複雑性トレンドを比較する人工生命シミュレータ",
    add_completion=False,
)

app.command("run")(run)
app.command("fitness")(fitness)
app.command("pairset")(pairset)
app.command("analyze")(analyze)


@app.callback(invoke_without_command=True)
def callback(
    ctx: typer.Context,
    version: bool = typer.Option(False, "--version", "-V", help="Show version"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="詳細ログを表示"),
) -> None:
    """Main callback for the CLI application."""
    if version:
        from neuro_drift import __version__

        console.print(f"neuro-drift version {__version__}")
        raise typer.Exit()

    setup_logging(verbose)

    if ctx.invoked_subcommand is None:
        console.print(
            "[yellow]No command specified. Use --help for available commands.[/yellow]"
        )
        console.print("\n[bold]Available commands:[/bold]")
        console.print("  run        シミュレーションを1本実行（driven / lockstep）")
        console.print("  fitness    複雑性を適応度とするラン")
        console.print("  pairset    driven/lockstep の組を複数実行")
        console.print("  analyze    ランセットを解析")


def main() -> None:
    """Entry point for the CLI application."""
    try:
        code = app(standalone_mode=False)
    except click.ClickException as e:
        # 引数の誤りは終了コード 1
        e.show()
        sys.exit(int(ExitCode.USAGE))
    except click.exceptions.Abort:
        console.print("[yellow]中断されました[/yellow]")
        sys.exit(int(ExitCode.USAGE))
    sys.exit(code or 0)


if __name__ == "__main__":
    main()
