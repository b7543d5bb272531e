"""Birth/death event models."""

from collections import defaultdict
from collections.abc import Iterable, Iterator
from enum import Enum

from pydantic import BaseModel, Field, model_validator


class EventKind(str, Enum):
    """イベントの種類."""

    BIRTH = "birth"
    DEATH = "death"


class DeathCause(str, Enum):
    """死因."""

    STARVATION = "starvation"
    OLD_AGE = "old-age"
    KILLED = "killed"
    FORCED = "forced"      # ロックステップでの強制死
    REPLACED = "replaced"  # 複雑性適応度モードでの置換


# 自然選択に由来する死因
NATURAL_CAUSES = frozenset({DeathCause.STARVATION, DeathCause.OLD_AGE, DeathCause.KILLED})


class Event(BaseModel):
    """誕生または死亡の記録."""

    model_config = {"frozen": True}

    step: int = Field(..., ge=0)
    kind: EventKind
    agent_id: int = Field(..., ge=0)
    parent1: int | None = None
    parent2: int | None = None
    cause: DeathCause | None = None

    @model_validator(mode="after")
    def validate_fields(self):
        """種類ごとの必須項目をチェック."""
        if self.kind == EventKind.BIRTH:
            if self.parent1 is None or self.parent2 is None:
                raise ValueError("誕生イベントには親が2体必要です")
            if self.cause is not None:
                raise ValueError("誕生イベントに死因は指定できません")
        else:
            if self.cause is None:
                raise ValueError("死亡イベントには死因が必要です")
            if self.parent1 is not None or self.parent2 is not None:
                raise ValueError("死亡イベントに親は指定できません")
        return self

    @classmethod
    def birth(cls, step: int, child_id: int, parent1: int, parent2: int) -> "Event":
        return cls(
            step=step, kind=EventKind.BIRTH, agent_id=child_id, parent1=parent1, parent2=parent2
        )

    @classmethod
    def death(cls, step: int, agent_id: int, cause: DeathCause) -> "Event":
        return cls(step=step, kind=EventKind.DEATH, agent_id=agent_id, cause=cause)


class EventLog:
    """追記専用のイベント列（ステップ非減少、ステップ内は死亡→誕生）."""

    def __init__(self, events: Iterable[Event] = ()):
        self._events: list[Event] = []
        for event in events:
            self.append(event)

    def append(self, event: Event) -> None:
        """イベントを追加."""
        if self._events:
            last = self._events[-1]
            if event.step < last.step:
                raise ValueError(
                    f"イベントのステップが減少しています: {last.step} → {event.step}"
                )
            if (
                event.step == last.step
                and last.kind == EventKind.BIRTH
                and event.kind == EventKind.DEATH
            ):
                raise ValueError(f"ステップ {event.step} で誕生の後に死亡が記録されています")
        self._events.append(event)

    def extend(self, events: Iterable[Event]) -> None:
        for event in events:
            self.append(event)

    def __iter__(self) -> Iterator[Event]:
        return iter(self._events)

    def __len__(self) -> int:
        return len(self._events)

    def __getitem__(self, index: int) -> Event:
        return self._events[index]

    @property
    def last_step(self) -> int:
        return self._events[-1].step if self._events else 0

    def by_step(self) -> dict[int, list[Event]]:
        """ステップ → イベント列."""
        index: dict[int, list[Event]] = defaultdict(list)
        for event in self._events:
            index[event.step].append(event)
        return dict(index)

    def count(self, kind: EventKind, cause: DeathCause | None = None) -> int:
        """種類（と死因）ごとの件数."""
        return sum(
            1
            for event in self._events
            if event.kind == kind and (cause is None or event.cause == cause)
        )

    def population_series(self, initial: int, steps: int) -> list[tuple[int, int, int, int]]:
        """ログから (step, population, births, deaths) を再構成."""
        index = self.by_step()
        population = initial
        rows = [(0, initial, 0, 0)]
        for step in range(1, steps + 1):
            events = index.get(step, [])
            births = sum(1 for e in events if e.kind == EventKind.BIRTH)
            deaths = len(events) - births
            population += births - deaths
            rows.append((step, population, births, deaths))
        return rows
