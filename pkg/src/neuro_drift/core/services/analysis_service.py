"""Population-level statistics over complexity reports and genome snapshots."""

import math
from collections.abc import Sequence

import numpy as np
import pandas as pd
from scipy import stats
from scipy.special import entr

from ..models import BinnedSeries, ComplexityReport, GCSeries, HistogramSeries, TSeries

_LN2 = math.log(2.0)


class AnalysisService:
    """死亡ビン平均・対応のある t 検定・ゲノム一貫性などの集計."""

    @staticmethod
    def bin_index(step: int, width: int) -> int:
        """ステップ step が入るビン番号 ⌈step / width⌉."""
        return -(-step // width)

    @staticmethod
    def bin_by_death(
        reports: Sequence[ComplexityReport], width: int, steps: int | None = None
    ) -> BinnedSeries:
        """
        死亡ステップでビン分けした C_approx の平均.

        Args:
            reports: 複雑性レポート
            width: ビン幅（ステップ）
            steps: ランの長さ。指定するとビンは [0, steps] 全体を覆う

        Returns:
            ビン系列（空のビンは None）
        """
        if width <= 0:
            raise ValueError("ビン幅は正の値である必要があります")

        last = max((r.death_step for r in reports), default=0)
        if steps is not None:
            last = max(last, steps)
        n_bins = max(AnalysisService.bin_index(last, width), 1)

        sums = [0.0] * n_bins
        counts = [0] * n_bins
        excluded = [0] * n_bins
        for report in reports:
            index = max(AnalysisService.bin_index(report.death_step, width), 1) - 1
            if report.valid and report.c_approx is not None:
                sums[index] += report.c_approx
                counts[index] += 1
            else:
                excluded[index] += 1

        return BinnedSeries(
            width=width,
            bin_ends=[(i + 1) * width for i in range(n_bins)],
            means=[s / c if c else None for s, c in zip(sums, counts, strict=True)],
            counts=counts,
            excluded=excluded,
        )

    @staticmethod
    def t_critical(df: int, alpha: float = 0.05, tails: str = "one") -> float:
        """t 分布の臨界値（片側 1−α、両側 1−α/2）."""
        quantile = 1.0 - alpha if tails == "one" else 1.0 - alpha / 2.0
        return float(stats.t.ppf(quantile, df))

    @staticmethod
    def paired_t(
        driven: Sequence[BinnedSeries],
        passive: Sequence[BinnedSeries],
        alpha: float = 0.05,
        tails: str = "one",
    ) -> TSeries:
        """
        ペアごとの差 d = driven − passive に対する対応のある t 検定.

        両方にデータがあるペアだけがそのビンに寄与する。
        sd = 0 のとき、平均 0 なら t = 0、そうでなければ平均と同じ符号の ∞（負の差は片側検定で
        有意にならない）。寄与ペアが2未満なら欠損。

        Raises:
            ValueError: ペア数が一致しない場合
        """
        if len(driven) != len(passive):
            raise ValueError(
                f"driven ({len(driven)}) と passive ({len(passive)}) のラン数が一致しません"
            )

        bin_ends = sorted({end for series in (*driven, *passive) for end in series.bin_ends})
        t_values: list[float | None] = []
        dfs: list[int | None] = []
        criticals: list[float | None] = []

        for end in bin_ends:
            diffs = []
            for d_series, p_series in zip(driven, passive, strict=True):
                d, p = d_series.value_at(end), p_series.value_at(end)
                if d is not None and p is not None:
                    diffs.append(d - p)

            n = len(diffs)
            if n < 2:
                t_values.append(None)
                dfs.append(None)
                criticals.append(None)
                continue

            values = np.asarray(diffs)
            mean = float(values.mean())
            sd = float(values.std(ddof=1))
            if sd == 0.0:
                t = 0.0 if mean == 0.0 else math.copysign(math.inf, mean)
            else:
                t = mean / (sd / math.sqrt(n))
            t_values.append(t)
            dfs.append(n - 1)
            criticals.append(AnalysisService.t_critical(n - 1, alpha, tails))

        return TSeries(
            bin_ends=bin_ends,
            t=t_values,
            df=dfs,
            t_critical=criticals,
            n_pairs=len(driven),
            alpha=alpha,
            tails=tails,
        )

    @staticmethod
    def site_entropies(bits: np.ndarray) -> np.ndarray:
        """サイトごとの集団内ビットエントロピー（bit、0·log0 = 0）."""
        bits = np.atleast_2d(np.asarray(bits))
        if bits.shape[0] == 0:
            raise ValueError("個体群が空です")
        p = bits.mean(axis=0)
        return (entr(p) + entr(1.0 - p)) / _LN2

    @staticmethod
    def genomic_consistency(bits: np.ndarray) -> tuple[float, np.ndarray]:
        """
        ゲノム一貫性 GC = Σ (1 − Hᵢ).

        Args:
            bits: 個体数 × L のビット行列

        Returns:
            (GC, サイトごとのエントロピー)
        """
        entropies = AnalysisService.site_entropies(bits)
        return float(entropies.size - entropies.sum()), entropies

    @staticmethod
    def bit_frequency(bits: np.ndarray) -> float:
        """全サイト・全個体の 1 ビットの割合."""
        bits = np.asarray(bits)
        if bits.size == 0:
            raise ValueError("個体群が空です")
        return float(bits.mean())

    @staticmethod
    def gc_series(
        snapshots: Sequence[tuple[int, np.ndarray]], genome_length: int
    ) -> GCSeries:
        """スナップショット列から GC(t) を作る（空の個体群は飛ばす）."""
        steps, values, populations = [], [], []
        for step, bits in snapshots:
            if bits.shape[0] == 0:
                continue
            gc, _ = AnalysisService.genomic_consistency(bits)
            steps.append(step)
            values.append(gc)
            populations.append(int(bits.shape[0]))
        return GCSeries(steps=steps, gc=values, populations=populations, genome_length=genome_length)

    @staticmethod
    def histogram_edges(values: Sequence[float], bins: int = 40) -> np.ndarray:
        """観測範囲を bins 等分した境界."""
        data = np.asarray([v for v in values if v is not None and math.isfinite(v)])
        if data.size == 0:
            return np.linspace(0.0, 1.0, bins + 1)
        return np.histogram_bin_edges(data, bins=bins)

    @staticmethod
    def histogram_series(
        reports: Sequence[ComplexityReport],
        time_width: int,
        value_bins: int = 40,
        edges: np.ndarray | None = None,
        steps: int | None = None,
    ) -> HistogramSeries:
        """
        時間ビン × 複雑性ビンの度数.

        Args:
            reports: 複雑性レポート（有効なものだけ数える）
            time_width: 時間ビン幅
            value_bins: 複雑性ビン数（edges 未指定時）
            edges: 複雑性ビンの境界（ラン間で揃える場合に指定）
            steps: ランの長さ
        """
        if time_width <= 0 or value_bins <= 0:
            raise ValueError("ビン幅とビン数は正の値である必要があります")

        valid = [r for r in reports if r.valid and r.c_approx is not None]
        if edges is None:
            edges = AnalysisService.histogram_edges([r.c_approx for r in valid], value_bins)
        edges = np.asarray(edges, dtype=float)

        last = max((r.death_step for r in reports), default=0)
        if steps is not None:
            last = max(last, steps)
        n_bins = max(AnalysisService.bin_index(last, time_width), 1)

        counts = np.zeros((n_bins, edges.size - 1), dtype=int)
        for index in range(n_bins):
            values = [
                r.c_approx
                for r in valid
                if max(AnalysisService.bin_index(r.death_step, time_width), 1) - 1 == index
            ]
            if values:
                # 範囲外の値は端のビンに寄せて件数を保存する
                clipped = np.clip(values, edges[0], edges[-1])
                counts[index], _ = np.histogram(clipped, bins=edges)

        return HistogramSeries(
            time_width=time_width,
            time_bin_ends=[(i + 1) * time_width for i in range(n_bins)],
            edges=edges.tolist(),
            counts=counts.tolist(),
        )

    @staticmethod
    def cross_run_means(series: Sequence[BinnedSeries]) -> pd.DataFrame:
        """
        ラン間での集団平均の平均と標準偏差.

        Returns:
            ``bin_end_step, mean, std, n_runs`` の DataFrame
        """
        bin_ends = sorted({end for s in series for end in s.bin_ends})
        rows = []
        for end in bin_ends:
            values = [v for s in series if (v := s.value_at(end)) is not None]
            n = len(values)
            rows.append(
                {
                    "bin_end_step": end,
                    "mean": float(np.mean(values)) if n else None,
                    "std": float(np.std(values, ddof=1)) if n >= 2 else None,
                    "n_runs": n,
                }
            )
        return pd.DataFrame(rows, columns=["bin_end_step", "mean", "std", "n_runs"])
