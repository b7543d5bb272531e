"""Neural architecture and brain state models."""

from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, Field, model_validator

# 出力ニューロンが担う行動（順序固定）
BEHAVIORS: tuple[str, ...] = ("move", "turn", "eat", "mate", "attack")


class InputGroup(BaseModel):
    """感覚入力グループ."""

    name: str
    size: int = Field(..., ge=1)


class ProcessingGroup(BaseModel):
    """処理グループ（興奮性・抑制性ニューロン数）."""

    excitatory: int = Field(..., ge=0)
    inhibitory: int = Field(..., ge=0)

    @property
    def size(self) -> int:
        return self.excitatory + self.inhibitory


class Pathway(BaseModel):
    """グループ間（pre → post）の結合仕様."""

    pre: str
    post: str
    density: float = Field(..., ge=0.0, le=1.0)
    distortion: float = Field(..., ge=0.0, le=1.0)
    learning_rate: float = Field(..., ge=0.0)


class NeuralArchitecture(BaseModel):
    """ゲノムからデコードされたネットワーク構造."""

    input_groups: list[InputGroup]
    processing_groups: list[ProcessingGroup]
    pathways: list[Pathway] = Field(default_factory=list)
    bias: float = 0.0
    max_weight: float = Field(..., gt=0.0, description="重み上限 w_max")
    green_move_bias: float = Field(0.0, ge=0.0, le=1.0, description="緑入力→move の重み（w_max比）")
    red_turn_bias: float = Field(0.0, ge=0.0, le=1.0, description="赤入力→turn の重み（w_max比）")
    eat_drive: float = Field(0.0, ge=0.0, le=1.0, description="eat 出力へのバイアス（w_max比）")
    mate_drive: float = Field(0.0, ge=0.0, le=1.0, description="mate 出力へのバイアス（w_max比）")

    @model_validator(mode="after")
    def validate_groups(self):
        """グループ名と結合の整合性をチェック."""
        if not self.processing_groups:
            raise ValueError("処理グループが1つ以上必要です")

        names = {group.name for group in self.input_groups} | set(self.processing_names)
        processing = set(self.processing_names)
        for pathway in self.pathways:
            if pathway.pre not in names:
                raise ValueError(f"未知の入力元グループです: {pathway.pre}")
            if pathway.post not in processing:
                raise ValueError(f"結合先は処理グループである必要があります: {pathway.post}")
        return self

    @property
    def processing_names(self) -> list[str]:
        """処理グループ名（p0, p1, ...）."""
        return [f"p{i}" for i in range(len(self.processing_groups))]

    @property
    def input_count(self) -> int:
        return sum(group.size for group in self.input_groups)

    @property
    def processing_count(self) -> int:
        return sum(group.size for group in self.processing_groups)


@dataclass
class Brain:
    """エージェント1体の脳の状態（単一所有者）.

    重み行列は ``weights[post, pre]`` の向きで保持する。
    """

    n_input: int
    excitatory: np.ndarray
    output_indices: np.ndarray
    weights: np.ndarray
    mask: np.ndarray
    eta: np.ndarray
    bias: np.ndarray
    max_weight: float
    activations: np.ndarray
    group_slices: dict[str, slice] = field(default_factory=dict)

    @property
    def n_neurons(self) -> int:
        return int(self.activations.size)

    @property
    def n_synapses(self) -> int:
        return int(np.count_nonzero(self.mask))

    @property
    def is_input(self) -> np.ndarray:
        """入力ニューロンかどうかのマスク."""
        roles = np.zeros(self.n_neurons, dtype=bool)
        roles[: self.n_input] = True
        return roles

    def output(self, behavior: str) -> float:
        """行動出力ニューロンの活性."""
        return float(self.activations[self.output_indices[BEHAVIORS.index(behavior)]])

    def synapses(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """シナプス一覧 (pre, post, weight, eta)."""
        post, pre = np.nonzero(self.mask)
        return pre, post, self.weights[post, pre], self.eta[post, pre]
