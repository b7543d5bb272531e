"""Artifact header and run-summary models."""

from pydantic import BaseModel, Field

from ... import ARTIFACT_FORMAT_VERSION
from ..config import RunMode


class ArtifactHeader(BaseModel):
    """全アーティファクト共通のヘッダ."""

    format_version: int = ARTIFACT_FORMAT_VERSION
    config_hash: str
    seed: int
    mode: RunMode
    steps: int | None = Field(None, description="ランの総ステップ数")
    schedule_hash: str | None = Field(None, description="lockstep が消費したイベントログの SHA-256")


class TraceHeader(ArtifactHeader):
    """生涯トレースファイルのヘッダ."""

    agent_id: int
    birth_step: int
    death_step: int
    n_total: int
    n_input: int
    roles: str = Field(..., description="列ごとの役割（I=入力, P=処理）")
    rows: int


class SnapshotHeader(ArtifactHeader):
    """ゲノムスナップショットファイルのヘッダ."""

    genome_length: int = Field(..., ge=1)


class RunSummary(BaseModel):
    """1ラン分の集計."""

    mode: RunMode
    seed: int
    config_hash: str
    steps: int
    initial_population: int
    final_population: int
    births: int = 0
    deaths: dict[str, int] = Field(default_factory=dict)
    forced_births: int = 0
    forced_deaths: int = 0
    replacements: int = 0
    crossovers: int = 0
    mutations: int = 0
    flipped_bits: int = 0
    traces_written: int = 0
    snapshots_written: int = 0
    energy_eaten: float = 0.0
    energy_depleted: float = 0.0
    energy_dissipated: float = 0.0
    energy_regrown: float = 0.0
    energy_floor_injected: float = 0.0
    extinct_at: int | None = None
