"""Run-set analysis: complexity reports, binned series, t-series, GC and histograms."""

import logging
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from ..artifacts import (
    RunDirectory,
    file_sha256,
    iter_traces,
    parse_comment_header,
    read_snapshots,
    read_trace,
)
from ..config import ConfigManager, NeuronFilter, RunConfig
from ..errors import ArtifactError, InconsistencyError, NothingToAnalyzeError
from ..models import (
    BinnedSeries,
    ComplexityReport,
    GCSeries,
    HistogramSeries,
    RunRecord,
    RunSetManifest,
    RunStatus,
    TSeries,
)
from .analysis_service import AnalysisService
from .complexity_service import ComplexityService
from .manifest_service import ManifestService
from .plot_service import PlotService

logger = logging.getLogger(__name__)

REPORT_COLUMNS = [
    "agent_id",
    "death_step",
    "filter",
    "C_approx",
    "C_exact",
    "integration",
    "entropy",
    "valid",
    "reason",
]


@dataclass
class RunAnalysis:
    """1ラン分の解析結果."""

    record: RunRecord
    reports: list[ComplexityReport]
    binned: BinnedSeries
    gc: GCSeries
    bit_frequency: list[tuple[int, float]]


@dataclass
class RunSetReport:
    """ランセット解析の成果物."""

    out_dir: Path
    n_pairs: int
    neuron_filter: NeuronFilter
    runs: dict[str, RunAnalysis] = field(default_factory=dict)
    t_series: TSeries | None = None
    cross_run: pd.DataFrame | None = None
    histograms: dict[str, HistogramSeries] = field(default_factory=dict)
    missing: dict[str, str] = field(default_factory=dict)
    inconsistent_pairs: list[int] = field(default_factory=list)
    files: list[Path] = field(default_factory=list)


def analyze_run_complexity(
    run_path: str, neuron_filter: str, config_data: dict
) -> list[ComplexityReport]:
    """
    ラン1件の全トレースから複雑性レポートを作る.

    ノイズはラン seed と agent id から決まるので、並列に計算しても結果は変わらない。
    """
    config = RunConfig.model_validate(config_data)
    run_dir = RunDirectory(run_path)
    reports = []
    for path in iter_traces(run_dir.traces):
        header, recording = read_trace(path)
        is_input = np.array([role == "I" for role in header.roles], dtype=bool)
        trace = ComplexityService.build_trace(
            recording,
            is_input,
            NeuronFilter(neuron_filter),
            config.complexity,
            ComplexityService.jitter_rng(header.seed, header.agent_id),
            agent_id=header.agent_id,
            birth_step=header.birth_step,
            death_step=header.death_step,
        )
        reports.append(ComplexityService.compute_report(trace, config.complexity))
    return reports


class ReportService:
    """ランセットの解析とCSV・プロットスクリプトの出力."""

    @staticmethod
    def load_config(root: str | Path) -> RunConfig:
        """ランセットのルートに保存された設定を読み込む."""
        path = Path(root) / "config.cfg"
        if not path.exists():
            raise ArtifactError(f"ランセットの設定ファイルが見つかりません: {path}")
        return ConfigManager(path).load()

    @staticmethod
    def check_pair(driven: RunRecord, lockstep: RunRecord, config_hash: str) -> None:
        """
        ペアのアーティファクトを検証.

        Raises:
            ArtifactError: アーティファクトが欠けている場合
            InconsistencyError: 設定ハッシュ・消費したスケジュールが一致しない場合
        """
        driven_dir = RunDirectory(driven.path)
        lockstep_dir = RunDirectory(lockstep.path)
        for run_dir in (driven_dir, lockstep_dir):
            run_dir.require_complete()
            for path in (run_dir.events, run_dir.snapshots, run_dir.traces):
                if not path.exists():
                    raise ArtifactError(f"アーティファクトがありません: {path}")

        headers = []
        for run_dir in (driven_dir, lockstep_dir):
            with open(run_dir.events, encoding="utf-8") as f:
                headers.append(parse_comment_header(f.readline().strip(), run_dir.events))

        for header, run_dir in zip(headers, (driven_dir, lockstep_dir), strict=True):
            if header.config_hash != config_hash:
                raise InconsistencyError(
                    f"設定ハッシュがランセットと一致しません: {run_dir.events}"
                )

        produced = file_sha256(driven_dir.events)
        consumed = headers[1].schedule_hash
        if consumed != produced:
            raise InconsistencyError(
                f"pair {driven.pair_index}: lockstep が消費したログ ({consumed}) が"
                f" driven のログ ({produced}) と一致しません"
            )

    @staticmethod
    def analyze(
        root: str | Path,
        out_dir: str | Path | None = None,
        config: RunConfig | None = None,
        neuron_filter: NeuronFilter | None = None,
        bin_width: int | None = None,
        alpha: float | None = None,
        tails: str | None = None,
        workers: int = 1,
        on_run: Callable[[str], None] | None = None,
    ) -> RunSetReport:
        """
        ランセットを解析してCSVとプロットスクリプトを書き出す.

        Args:
            root: ランセットのルートディレクトリ
            out_dir: 出力先（既定は root/analysis）
            config: 設定（既定は root/config.cfg）
            neuron_filter: 複雑性に使うニューロン（既定は設定値）
            bin_width: 死亡ビンの幅（既定は設定値）
            alpha: 有意水準（既定は設定値）
            tails: one / two（既定は設定値）
            workers: 複雑性計算の並列数
            on_run: ラン1件の解析完了ごとのコールバック

        Returns:
            解析結果

        Raises:
            NothingToAnalyzeError: 解析できる完了ペアが無い場合
            InconsistencyError: 完了ペアが全て整合性エラーで除外された場合
        """
        root = Path(root)
        manifest = ManifestService.load(root)
        if config is None:
            config = ReportService.load_config(root)
        settings = config.analysis
        neuron_filter = neuron_filter or config.complexity.neurons
        bin_width = bin_width or settings.bin_width
        alpha = alpha if alpha is not None else settings.alpha
        tails = tails or settings.tails
        if tails not in ("one", "two"):
            raise ValueError(f"tails は one か two です: {tails}")

        out = Path(out_dir) if out_dir is not None else root / "analysis"
        report = RunSetReport(out_dir=out, n_pairs=manifest.n_pairs, neuron_filter=neuron_filter)

        pairs = ReportService._usable_pairs(manifest, report)
        if not pairs and report.inconsistent_pairs:
            raise InconsistencyError(
                f"全ての完了ペア ({len(report.inconsistent_pairs)} 組) の整合性が壊れています: {root}"
            )
        if not pairs:
            raise NothingToAnalyzeError(f"解析できる完了ペアがありません: {root}")

        complexity, failures = ReportService._compute_complexity(
            [record for pair in pairs for record in pair], neuron_filter, config, workers
        )
        for run_id, error in failures.items():
            report.missing[run_id] = error
            logger.warning("%s を除外します: %s", run_id, error)
        pairs = [
            (driven, lockstep)
            for driven, lockstep in pairs
            if driven.run_id not in failures and lockstep.run_id not in failures
        ]
        if not pairs:
            raise NothingToAnalyzeError(f"解析できる完了ペアがありません: {root}")

        for record in (record for pair in pairs for record in pair):
            run_id = record.run_id
            report.runs[run_id] = ReportService._analyze_run(
                record, complexity[run_id], bin_width, config.steps
            )
            if on_run is not None:
                on_run(run_id)

        driven_series = [report.runs[d.run_id].binned for d, _ in pairs]
        passive_series = [report.runs[p.run_id].binned for _, p in pairs]
        report.t_series = AnalysisService.paired_t(driven_series, passive_series, alpha, tails)
        report.cross_run = ReportService._cross_run_table(report, pairs)

        values = [
            r.c_approx
            for run in report.runs.values()
            for r in run.reports
            if r.valid and r.c_approx is not None
        ]
        edges = AnalysisService.histogram_edges(values, settings.histogram_bins)
        for run_id, run in report.runs.items():
            report.histograms[run_id] = AnalysisService.histogram_series(
                run.reports, bin_width, edges=edges, steps=config.steps
            )

        ReportService.write_outputs(report, config)
        logger.info(
            "解析完了: %d ペア（欠落 %d 件、整合性エラー %d 組）→ %s",
            len(pairs),
            len(report.missing),
            len(report.inconsistent_pairs),
            out,
        )
        return report

    @staticmethod
    def _usable_pairs(
        manifest: RunSetManifest, report: RunSetReport
    ) -> list[tuple[RunRecord, RunRecord]]:
        """完了済みで検証を通ったペア（欠落は report.missing に記録）."""
        usable = []
        for index in range(manifest.n_pairs):
            driven, lockstep = manifest.pair(index)
            if driven is None or lockstep is None:
                continue
            if driven.status != RunStatus.COMPLETE or lockstep.status != RunStatus.COMPLETE:
                for record in (driven, lockstep):
                    if record.status != RunStatus.COMPLETE:
                        report.missing[record.run_id] = record.error or record.status.value
                continue
            try:
                ReportService.check_pair(driven, lockstep, manifest.config_hash)
            except ArtifactError as e:
                report.missing[f"pair_{index:03d}"] = str(e)
                logger.warning("pair %d を除外します: %s", index, e)
                continue
            except InconsistencyError as e:
                report.missing[f"pair_{index:03d}"] = str(e)
                report.inconsistent_pairs.append(index)
                logger.warning("pair %d は整合性が壊れているため除外します: %s", index, e)
                continue
            usable.append((driven, lockstep))
        return usable

    @staticmethod
    def _compute_complexity(
        records: list[RunRecord], neuron_filter: NeuronFilter, config: RunConfig, workers: int
    ) -> tuple[dict[str, list[ComplexityReport]], dict[str, str]]:
        """ランごとの複雑性レポートと、読めなかったランのエラー."""
        config_data = config.model_dump(mode="json")
        results: dict[str, list[ComplexityReport]] = {}
        failures: dict[str, str] = {}
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = {
                    r.run_id: pool.submit(
                        analyze_run_complexity, str(r.path), neuron_filter.value, config_data
                    )
                    for r in records
                }
                for run_id, future in futures.items():
                    try:
                        results[run_id] = future.result()
                    except ArtifactError as e:
                        failures[run_id] = str(e)
        else:
            for r in records:
                try:
                    results[r.run_id] = analyze_run_complexity(
                        str(r.path), neuron_filter.value, config_data
                    )
                except ArtifactError as e:
                    failures[r.run_id] = str(e)
        return results, failures

    @staticmethod
    def _analyze_run(
        record: RunRecord, reports: list[ComplexityReport], bin_width: int, steps: int
    ) -> RunAnalysis:
        run_dir = RunDirectory(record.path)
        header, snapshots = read_snapshots(run_dir.snapshots)
        gc = AnalysisService.gc_series(snapshots, header.genome_length)
        frequencies = [
            (step, AnalysisService.bit_frequency(bits))
            for step, bits in snapshots
            if bits.shape[0] > 0
        ]
        excluded = sum(1 for r in reports if not r.valid)
        if excluded:
            logger.debug("%s: 無効な複雑性レポート %d 件", record.run_id, excluded)
        return RunAnalysis(
            record=record,
            reports=reports,
            binned=AnalysisService.bin_by_death(reports, bin_width, steps),
            gc=gc,
            bit_frequency=frequencies,
        )

    @staticmethod
    def _cross_run_table(
        report: RunSetReport, pairs: list[tuple[RunRecord, RunRecord]]
    ) -> pd.DataFrame:
        frames = []
        for position, mode in ((0, "driven"), (1, "lockstep")):
            series = [report.runs[pair[position].run_id].binned for pair in pairs]
            frame = AnalysisService.cross_run_means(series)
            frame.insert(1, "mode", mode)
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)

    @staticmethod
    def write_outputs(report: RunSetReport, config: RunConfig) -> list[Path]:
        """CSVとプロットスクリプトを書き出す."""
        out = report.out_dir
        (out / "complexity").mkdir(parents=True, exist_ok=True)
        (out / "histograms").mkdir(parents=True, exist_ok=True)
        files: list[Path] = []

        mean_rows, gc_rows, frequency_rows = [], [], []
        for run_id, run in report.runs.items():
            mode = run.record.mode.value
            path = out / "complexity" / f"{run_id}.csv"
            ReportService._reports_frame(run.reports).to_csv(path, index=False)
            files.append(path)

            binned = run.binned
            for end, mean, count, excluded in zip(
                binned.bin_ends, binned.means, binned.counts, binned.excluded, strict=True
            ):
                mean_rows.append((end, run_id, mode, mean, count, excluded))
            for step, gc, population in zip(
                run.gc.steps, run.gc.gc, run.gc.populations, strict=True
            ):
                gc_rows.append((step, run_id, mode, gc, population))
            for step, frequency in run.bit_frequency:
                frequency_rows.append((step, run_id, mode, frequency))

        tables = {
            "mean_series.csv": pd.DataFrame(
                mean_rows,
                columns=["bin_end_step", "run_id", "mode", "mean_C", "count", "excluded"],
            ),
            "gc_series.csv": pd.DataFrame(
                gc_rows, columns=["step", "run_id", "mode", "gc", "population"]
            ),
            "bit_frequency.csv": pd.DataFrame(
                frequency_rows, columns=["step", "run_id", "mode", "bit_frequency"]
            ),
            "t_series.csv": ReportService._t_frame(report.t_series),
        }
        if report.cross_run is not None:
            tables["cross_run_means.csv"] = report.cross_run
        for name, frame in tables.items():
            path = out / name
            frame.to_csv(path, index=False)
            files.append(path)

        for run_id, histogram in report.histograms.items():
            path = out / "histograms" / f"{run_id}.csv"
            ReportService.write_histogram(path, histogram)
            files.append(path)

        files.extend(PlotService.write_scripts(report, config))
        report.files = files
        return files

    @staticmethod
    def _reports_frame(reports: list[ComplexityReport]) -> pd.DataFrame:
        rows = [
            (
                r.agent_id,
                r.death_step,
                r.neuron_filter.value,
                r.c_approx,
                r.c_exact,
                r.integration,
                r.entropy,
                r.valid,
                r.reason,
            )
            for r in reports
        ]
        return pd.DataFrame(rows, columns=REPORT_COLUMNS)

    @staticmethod
    def _t_frame(series: TSeries | None) -> pd.DataFrame:
        columns = ["bin_end_step", "t", "df", "t_critical", "significant"]
        if series is None:
            return pd.DataFrame(columns=columns)
        frame = pd.DataFrame(
            {
                "bin_end_step": series.bin_ends,
                "t": series.t,
                "df": pd.array(series.df, dtype="Int64"),
                "t_critical": series.t_critical,
                "significant": pd.array(
                    [series.significant(i) for i in range(len(series.bin_ends))],
                    dtype="boolean",
                ),
            },
            columns=columns,
        )
        return frame

    @staticmethod
    def write_histogram(path: str | Path, histogram: HistogramSeries) -> Path:
        """ヒストグラムを ``# edges=`` 行と非ゼロセルの三つ組で書き出す."""
        path = Path(path)
        counts = np.asarray(histogram.counts, dtype=int).reshape(
            len(histogram.time_bin_ends), histogram.value_bins
        )
        time_bins, value_bins = np.nonzero(counts)
        frame = pd.DataFrame(
            {
                "time_bin": time_bins + 1,
                "value_bin": value_bins,
                "count": counts[time_bins, value_bins],
            }
        )
        edges = ",".join(repr(float(e)) for e in histogram.edges)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(
                f"# edges={edges} time_width={histogram.time_width}"
                f" time_bins={len(histogram.time_bin_ends)}\n"
            )
            frame.to_csv(f, index=False)
        return path

    @staticmethod
    def significant_bins(series: TSeries) -> list[int]:
        """T* を超えたビンの終端ステップ."""
        return [
            end
            for index, end in enumerate(series.bin_ends)
            if series.significant(index)
        ]
