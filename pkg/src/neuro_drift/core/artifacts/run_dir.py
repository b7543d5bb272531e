"""Layout of a single run directory, completion markers and the sidecar."""

from datetime import datetime
from pathlib import Path

import yaml

from ..errors import ArtifactError
from ..models import RunSummary

COMPLETE_MARKER = "COMPLETE"
INCOMPLETE_MARKER = "INCOMPLETE"


class RunDirectory:
    """1ラン分のアーティファクトの置き場所."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    @property
    def events(self) -> Path:
        return self.path / "events.csv"

    @property
    def population(self) -> Path:
        return self.path / "population.csv"

    @property
    def traces(self) -> Path:
        return self.path / "traces"

    @property
    def snapshots(self) -> Path:
        return self.path / "snapshots.bin"

    @property
    def gene_map(self) -> Path:
        return self.path / "gene_map.csv"

    @property
    def config(self) -> Path:
        return self.path / "config.cfg"

    @property
    def summary(self) -> Path:
        return self.path / "summary.yaml"

    @property
    def run_id(self) -> str:
        return self.path.name

    def exists(self) -> bool:
        return self.path.exists() and any(self.path.iterdir())

    def prepare(self) -> None:
        """ディレクトリを作成し、前回のマーカーとトレースを消す."""
        self.traces.mkdir(parents=True, exist_ok=True)
        for stale in self.traces.glob("agent_*.trace"):
            stale.unlink()
        for marker in (COMPLETE_MARKER, INCOMPLETE_MARKER):
            (self.path / marker).unlink(missing_ok=True)

    def is_complete(self) -> bool:
        return (self.path / COMPLETE_MARKER).exists()

    def is_incomplete(self) -> bool:
        return (self.path / INCOMPLETE_MARKER).exists()

    def mark_complete(self) -> None:
        (self.path / INCOMPLETE_MARKER).unlink(missing_ok=True)
        (self.path / COMPLETE_MARKER).write_text("", encoding="utf-8")

    def mark_incomplete(self, error: str) -> None:
        """失敗したランに印を付ける（内容はエラー文）."""
        self.path.mkdir(parents=True, exist_ok=True)
        (self.path / COMPLETE_MARKER).unlink(missing_ok=True)
        (self.path / INCOMPLETE_MARKER).write_text(error + "\n", encoding="utf-8")

    def incomplete_reason(self) -> str | None:
        marker = self.path / INCOMPLETE_MARKER
        if not marker.exists():
            return None
        return marker.read_text(encoding="utf-8").strip()

    def require_complete(self) -> None:
        """
        完了済みでなければエラー.

        Raises:
            ArtifactError: 完了マーカーが無い場合
        """
        if not self.is_complete():
            reason = self.incomplete_reason()
            detail = f": {reason}" if reason else ""
            raise ArtifactError(f"ランが完了していません: {self.path}{detail}")

    def write_summary(self, summary: RunSummary, started: datetime, finished: datetime) -> Path:
        """集計と時刻をサイドカーに書く（時刻は決定的なファイルに入れない）."""
        payload = {
            "started_at": started.isoformat(timespec="seconds"),
            "finished_at": finished.isoformat(timespec="seconds"),
            "elapsed_seconds": round((finished - started).total_seconds(), 3),
            "summary": summary.model_dump(mode="json"),
        }
        self.summary.write_text(
            yaml.safe_dump(payload, sort_keys=False, allow_unicode=True), encoding="utf-8"
        )
        return self.summary

    def read_summary(self) -> RunSummary:
        if not self.summary.exists():
            raise ArtifactError(f"サマリーが見つかりません: {self.summary}")
        payload = yaml.safe_load(self.summary.read_text(encoding="utf-8")) or {}
        return RunSummary.model_validate(payload.get("summary", {}))
