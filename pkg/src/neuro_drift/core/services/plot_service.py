"""gnuplot script emitter for the analysis CSVs."""

from pathlib import Path
from typing import TYPE_CHECKING

from ..config import RunConfig

if TYPE_CHECKING:
    from .report_service import RunSetReport

# 全図に共通する gnuplot 設定
FIGURE_SETTINGS = {
    "datafile separator": '","',
    "terminal": "pngcairo size 1200,800 font 'Sans,10'",
    "grid": "",
    "key": "outside right top",
}

_MODE_COLORS = {"driven": "#1f4e9c", "lockstep": "#b23a1e"}
_LIGHT_COLORS = {"driven": "#a8bfe6", "lockstep": "#eab3a6"}


def _preamble(output: str) -> list[str]:
    lines = [f"set {key} {value}".rstrip() for key, value in FIGURE_SETTINGS.items()]
    lines.append(f"set output '{output}'")
    return lines


def _select(column: int, run_id: str, value: str) -> str:
    """run_id 列が一致する行だけ値を返す using 式."""
    return f'(strcol({column}) eq "{run_id}" ? {value} : NaN)'


class PlotService:
    """解析CSVを描画する gnuplot スクリプトの生成."""

    @staticmethod
    def complexity_script(
        run_modes: dict[str, str], t_critical: float | None, tails: str = "one"
    ) -> str:
        """
        複雑性の時系列（ラン別の細線、ラン間平均の太線）と t 系列の2段図.

        Args:
            run_modes: run_id → mode
            t_critical: 水平に引く臨界値（全ビン共通でなければ None）
            tails: one / two
        """
        lines = _preamble("complexity.png")
        lines += [
            "set datafile missing NaN",
            "set multiplot layout 2,1",
            "set title 'Mean complexity of agents dying in each bin'",
            "set xlabel 'time step'",
            "set ylabel 'complexity (bits)'",
        ]
        clauses = []
        for run_id, mode in run_modes.items():
            clauses.append(
                f"'mean_series.csv' skip 1 using 1:{_select(2, run_id, '$4')} "
                f"with lines lw 1 lc rgb '{_LIGHT_COLORS.get(mode, '#cccccc')}' notitle"
            )
        for mode, color in _MODE_COLORS.items():
            clauses.append(
                f"'cross_run_means.csv' skip 1 using 1:{_select(2, mode, '$3')} "
                f"with lines lw 3 lc rgb '{color}' title '{mode} mean'"
            )
        lines.append("plot " + ", \\\n     ".join(clauses))

        lines += [
            "set title 'Paired t (driven - lockstep)'",
            "set ylabel 't'",
        ]
        rules = ["0 with lines lc rgb '#888888' dt 3 notitle"]
        if t_critical is not None:
            rules.append(f"{t_critical!r} with lines lc rgb '#000000' dt 2 title 'T*'")
            if tails == "two":
                rules.append(f"{-t_critical!r} with lines lc rgb '#000000' dt 2 notitle")
        lines.append(
            "plot 't_series.csv' skip 1 using 1:2 with linespoints pt 7 lc rgb '#333333' "
            "title 't', \\\n     "
            + ", \\\n     ".join(rules)
        )
        lines += ["unset multiplot", "set output"]
        return "\n".join(lines) + "\n"

    @staticmethod
    def gc_script(run_modes: dict[str, str], genome_length: int) -> str:
        """ゲノム一貫性 GC(t) の時系列図."""
        lines = _preamble("genomic_consistency.png")
        lines += [
            "set title 'Genomic consistency'",
            "set xlabel 'time step'",
            "set ylabel 'GC (bits)'",
            f"set yrange [0:{genome_length}]",
        ]
        clauses = [
            f"'gc_series.csv' skip 1 using 1:{_select(2, run_id, '$4')} "
            f"with lines lw 2 lc rgb '{_MODE_COLORS.get(mode, '#555555')}' "
            f"title '{run_id}'"
            for run_id, mode in run_modes.items()
        ]
        lines.append("plot " + ", \\\n     ".join(clauses))
        lines.append("set output")
        return "\n".join(lines) + "\n"

    @staticmethod
    def histogram_script(
        run_id: str, data_file: str, edges: list[float], time_width: int
    ) -> str:
        """1ラン分の複雑性ヒストグラムのヒートマップ."""
        low = edges[0]
        step = (edges[-1] - edges[0]) / max(len(edges) - 1, 1)
        lines = _preamble(f"histogram_{run_id}.png")
        lines += [
            f"set title 'Complexity histogram over time: {run_id}'",
            "set xlabel 'time step'",
            "set ylabel 'complexity (bits)'",
            "set cblabel 'agents'",
            "set palette defined (0 'white', 1 '#fde0c5', 5 '#e34a33', 20 '#7f0000')",
            f"set yrange [{low!r}:{edges[-1]!r}]",
            "set style fill solid 1.0 noborder",
            f"plot '{data_file}' skip 2 using "
            f"(($1 - 0.5) * {time_width}):({low!r} + ($2 + 0.5) * {step!r}):"
            f"({time_width / 2!r}):({step / 2!r}):3 "
            "with boxxyerror lc palette notitle",
            "set output",
        ]
        return "\n".join(lines) + "\n"

    @staticmethod
    def write_scripts(report: "RunSetReport", config: RunConfig) -> list[Path]:
        """解析ディレクトリにスクリプトを書き出す."""
        out = report.out_dir
        run_modes = {run_id: run.record.mode.value for run_id, run in report.runs.items()}

        critical = None
        if report.t_series is not None:
            values = {c for c in report.t_series.t_critical if c is not None}
            if len(values) == 1:
                critical = values.pop()

        scripts = {
            "complexity.gp": PlotService.complexity_script(
                run_modes, critical, report.t_series.tails if report.t_series else "one"
            ),
            "genomic_consistency.gp": PlotService.gc_script(run_modes, config.genome.length),
        }
        for run_id, histogram in report.histograms.items():
            scripts[f"histogram_{run_id}.gp"] = PlotService.histogram_script(
                run_id, f"histograms/{run_id}.csv", histogram.edges, histogram.time_width
            )

        paths = []
        for name, text in scripts.items():
            path = out / name
            path.write_text(text, encoding="utf-8")
            paths.append(path)
        return paths
