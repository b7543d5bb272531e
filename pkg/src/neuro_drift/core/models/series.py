"""Population-level statistic series."""

import math

from pydantic import BaseModel, Field, model_validator


class BinnedSeries(BaseModel):
    """死亡ステップでビン分けした統計量の平均."""

    width: int = Field(..., ge=1)
    bin_ends: list[int]
    means: list[float | None]
    counts: list[int]
    excluded: list[int]

    @model_validator(mode="after")
    def validate_lengths(self):
        """各列の長さが一致することをチェック."""
        n = len(self.bin_ends)
        if not (len(self.means) == len(self.counts) == len(self.excluded) == n):
            raise ValueError("ビン列の長さが一致しません")
        return self

    @property
    def total_excluded(self) -> int:
        return sum(self.excluded)

    def value_at(self, bin_end: int) -> float | None:
        """指定ビンの平均（欠損なら None）."""
        try:
            return self.means[self.bin_ends.index(bin_end)]
        except ValueError:
            return None


class TSeries(BaseModel):
    """対応のある t 検定の系列（駆動 − 受動）."""

    bin_ends: list[int]
    t: list[float | None]
    df: list[int | None]
    t_critical: list[float | None]
    n_pairs: int = Field(..., ge=0)
    alpha: float = 0.05
    tails: str = "one"

    def significant(self, index: int) -> bool | None:
        """T* を超えたか（欠損なら None）."""
        t, critical = self.t[index], self.t_critical[index]
        if t is None or critical is None:
            return None
        return t > critical if self.tails == "one" else abs(t) > critical


class GCSeries(BaseModel):
    """ゲノム一貫性 GC(t) の系列."""

    steps: list[int]
    gc: list[float]
    populations: list[int]
    genome_length: int

    @model_validator(mode="after")
    def validate_bounds(self):
        """0 ≤ GC ≤ L をチェック."""
        for value in self.gc:
            if not (-1e-9 <= value <= self.genome_length + 1e-9) or math.isnan(value):
                raise ValueError(f"GC が範囲外です: {value}")
        return self


class HistogramSeries(BaseModel):
    """時間ビンごとの複雑性ヒストグラム."""

    time_width: int = Field(..., ge=1)
    time_bin_ends: list[int]
    edges: list[float]
    counts: list[list[int]]

    @property
    def value_bins(self) -> int:
        return len(self.edges) - 1
