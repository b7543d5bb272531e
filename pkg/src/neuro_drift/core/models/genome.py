"""Genome and gene-map models."""

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field, model_validator

# 遺伝子名 → 物理値（整数遺伝子は int）
GeneValues = dict[str, float | int]


class GeneSpec(BaseModel):
    """1つの遺伝子のビット配置と値域."""

    name: str = Field(..., description="遺伝子名")
    offset: int = Field(..., ge=0, description="先頭ビット位置")
    width: int = Field(..., ge=1, le=31, description="ビット幅")
    min_value: float = Field(..., description="raw=0 に対応する値")
    max_value: float = Field(..., description="raw=2^width-1 に対応する値")
    integer: bool = Field(False, description="整数遺伝子かどうか（最近接に丸める）")
    scale: str = Field("linear", description="デコード方式")

    @model_validator(mode="after")
    def validate_range(self):
        """値域と方式をチェック."""
        if self.min_value > self.max_value:
            raise ValueError(f"遺伝子 '{self.name}' の min_value が max_value を超えています")
        if self.scale != "linear":
            raise ValueError(f"未対応のデコード方式です: {self.scale}")
        return self

    @property
    def end(self) -> int:
        """終端ビット位置（排他的）."""
        return self.offset + self.width

    @property
    def raw_max(self) -> int:
        """raw 値の最大."""
        return (1 << self.width) - 1


class GeneMap(BaseModel):
    """ゲノム上の遺伝子配置表."""

    genome_length: int = Field(..., ge=1)
    entries: list[GeneSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_layout(self):
        """遺伝子が重ならず、ゲノム内に収まることをチェック."""
        names = [entry.name for entry in self.entries]
        if len(names) != len(set(names)):
            raise ValueError("遺伝子名が重複しています")

        covered = np.zeros(self.genome_length, dtype=bool)
        for entry in self.entries:
            if entry.end > self.genome_length:
                raise ValueError(
                    f"遺伝子 '{entry.name}' がゲノム長 {self.genome_length} を超えています"
                )
            if covered[entry.offset : entry.end].any():
                raise ValueError(f"遺伝子 '{entry.name}' が他の遺伝子と重なっています")
            covered[entry.offset : entry.end] = True
        return self

    def get(self, name: str) -> GeneSpec:
        """名前から遺伝子を取得."""
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise KeyError(name)

    def __contains__(self, name: object) -> bool:
        return any(entry.name == name for entry in self.entries)

    @property
    def expressed_bits(self) -> int:
        """遺伝子に割り当てられたビット数."""
        return sum(entry.width for entry in self.entries)


@dataclass(frozen=True, eq=False)
class Genome:
    """固定長ビット列ゲノム（不変）."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise ValueError("ゲノムは1次元のビット列である必要があります")
        if bits.size and bits.max() > 1:
            raise ValueError("ゲノムのビットは 0 または 1 である必要があります")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def zeros(cls, length: int) -> "Genome":
        """全ビット0のゲノム."""
        return cls(np.zeros(length, dtype=np.uint8))

    @classmethod
    def ones(cls, length: int) -> "Genome":
        """全ビット1のゲノム."""
        return cls(np.ones(length, dtype=np.uint8))

    @property
    def length(self) -> int:
        return int(self.bits.size)

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Genome):
            return NotImplemented
        return bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash(self.to_bytes())

    def hamming(self, other: "Genome") -> int:
        """ハミング距離."""
        return int(np.count_nonzero(self.bits != other.bits))

    def to_bytes(self) -> bytes:
        """8サイト/バイト、最下位サイトを MSB としたビットダンプ."""
        return np.packbits(self.bits, bitorder="big").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, length: int) -> "Genome":
        """ビットダンプから復元."""
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="big")
        return cls(bits[:length])
