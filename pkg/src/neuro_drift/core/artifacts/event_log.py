"""Event log file: ``step,kind,agent_id,parent1,parent2,cause``."""

from pathlib import Path

import pandas as pd

from ..errors import ArtifactError
from ..models import ArtifactHeader, DeathCause, Event, EventKind, EventLog
from .headers import format_comment_header, parse_comment_header

EVENT_COLUMNS = ["step", "kind", "agent_id", "parent1", "parent2", "cause"]


def events_to_frame(events: EventLog | list[Event]) -> pd.DataFrame:
    """イベント列を DataFrame に変換（該当しない項目は欠損）."""
    rows = [
        {
            "step": event.step,
            "kind": event.kind.value,
            "agent_id": event.agent_id,
            "parent1": event.parent1,
            "parent2": event.parent2,
            "cause": event.cause.value if event.cause is not None else None,
        }
        for event in events
    ]
    frame = pd.DataFrame(rows, columns=EVENT_COLUMNS)
    for column in ("step", "agent_id", "parent1", "parent2"):
        frame[column] = frame[column].astype("Int64")
    return frame


def write_event_log(path: str | Path, header: ArtifactHeader, events: EventLog) -> Path:
    """イベントログを書き出す."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(format_comment_header(header) + "\n")
        events_to_frame(events).to_csv(f, index=False, lineterminator="\n")
    return path


def read_event_log(path: str | Path) -> tuple[ArtifactHeader, EventLog]:
    """
    イベントログを読み込む.

    Raises:
        ArtifactError: ファイルが無い、または内容が不正な場合
        InconsistencyError: フォーマットのバージョンが異なる場合
    """
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"イベントログが見つかりません: {path}")

    with open(path, encoding="utf-8") as f:
        header = parse_comment_header(f.readline().strip(), path)
        frame = pd.read_csv(
            f,
            dtype={
                "step": "Int64",
                "kind": "string",
                "agent_id": "Int64",
                "parent1": "Int64",
                "parent2": "Int64",
                "cause": "string",
            },
        )

    if list(frame.columns) != EVENT_COLUMNS:
        raise ArtifactError(f"イベントログの列が不正です: {list(frame.columns)} ({path})")

    log = EventLog()
    try:
        for row in frame.itertuples(index=False):
            if row.kind == EventKind.BIRTH.value:
                log.append(
                    Event.birth(int(row.step), int(row.agent_id), int(row.parent1), int(row.parent2))
                )
            else:
                log.append(Event.death(int(row.step), int(row.agent_id), DeathCause(row.cause)))
    except (TypeError, ValueError) as e:
        raise ArtifactError(f"イベントログの内容が不正です: {path}: {e}") from e
    return header, log
