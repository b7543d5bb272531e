"""Run-set manifest models."""

from enum import Enum
from pathlib import Path

from pydantic import BaseModel, Field

from ..config import RunMode


class RunStatus(str, Enum):
    """ランの進行状態."""

    PENDING = "pending"
    RUNNING = "running"
    COMPLETE = "complete"
    FAILED = "failed"


class RunRecord(BaseModel):
    """ランセット内の1ラン."""

    pair_index: int = Field(..., ge=0)
    mode: RunMode
    seed: int
    path: Path
    status: RunStatus = RunStatus.PENDING
    schedule_hash: str | None = Field(None, description="driven: 出力したログ / lockstep: 消費したログ")
    error: str | None = None

    @property
    def run_id(self) -> str:
        """ランセット内で一意なラベル（例: pair_003-driven）."""
        return f"{self.path.parent.name}-{self.mode.value}"


class RunSetManifest(BaseModel):
    """対になったランの集合."""

    id: int | None = None
    root: Path
    n_pairs: int = Field(..., ge=1)
    base_seed: int = Field(..., ge=0)
    config_hash: str
    runs: list[RunRecord] = Field(default_factory=list)

    def pair(self, index: int) -> tuple[RunRecord | None, RunRecord | None]:
        """ペア index の (driven, lockstep)."""
        driven = next(
            (r for r in self.runs if r.pair_index == index and r.mode == RunMode.DRIVEN), None
        )
        lockstep = next(
            (r for r in self.runs if r.pair_index == index and r.mode == RunMode.LOCKSTEP), None
        )
        return driven, lockstep

    def completed_pairs(self) -> list[tuple[RunRecord, RunRecord]]:
        """両方が完了したペア."""
        pairs = []
        for index in range(self.n_pairs):
            driven, lockstep = self.pair(index)
            if (
                driven is not None
                and lockstep is not None
                and driven.status == RunStatus.COMPLETE
                and lockstep.status == RunStatus.COMPLETE
            ):
                pairs.append((driven, lockstep))
        return pairs
