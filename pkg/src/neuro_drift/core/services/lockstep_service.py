"""Lockstep replay: the recorded birth/death schedule with random parentage and mortality."""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..artifacts import file_sha256, read_event_log
from ..config import RunConfig, RunMode, config_hash
from ..errors import InconsistencyError, StillbornError
from ..models import (
    Agent,
    ArtifactHeader,
    DeathCause,
    EventKind,
    EventLog,
    GeneMap,
    StepResult,
    WorldState,
)
from .world_service import StepRules, WorldService

logger = logging.getLogger(__name__)

# 強制誕生1件あたりの親の引き直し上限
BIRTH_ATTEMPTS = 100


@dataclass(frozen=True)
class LockstepSchedule:
    """駆動ランのイベントログをステップで引けるようにしたもの（不変）."""

    steps: int
    deaths: dict[int, int]
    births: dict[int, int]
    config_hash: str | None = None
    source_hash: str | None = None

    @classmethod
    def from_event_log(
        cls,
        log: EventLog,
        steps: int,
        config_hash: str | None = None,
        source_hash: str | None = None,
    ) -> "LockstepSchedule":
        deaths: dict[int, int] = {}
        births: dict[int, int] = {}
        for event in log:
            target = births if event.kind == EventKind.BIRTH else deaths
            target[event.step] = target.get(event.step, 0) + 1
        return cls(
            steps=steps,
            deaths=deaths,
            births=births,
            config_hash=config_hash,
            source_hash=source_hash,
        )

    def at(self, step: int) -> tuple[int, int]:
        """
        ステップ step の (死亡数, 誕生数).

        Raises:
            InconsistencyError: スケジュールの範囲外（枯渇）の場合
        """
        if step < 0 or step > self.steps:
            raise InconsistencyError(
                f"スケジュールはステップ {self.steps} までしかありません（要求: {step}）"
            )
        return self.deaths.get(step, 0), self.births.get(step, 0)

    @property
    def total_deaths(self) -> int:
        return sum(self.deaths.values())

    @property
    def total_births(self) -> int:
        return sum(self.births.values())


@dataclass
class LockstepReplayer:
    """スケジュールどおりに強制的な死亡と誕生を起こす."""

    schedule: LockstepSchedule
    config: RunConfig
    gene_map: GeneMap
    forced_deaths: int = 0
    forced_births: int = 0

    def rules(self) -> StepRules:
        """自然死・自然誕生を止め、エネルギー下限を設けた規則."""
        world = self.config.world
        return StepRules(
            natural_deaths=False,
            natural_births=False,
            energy_floor=self.config.lockstep.energy_floor_fraction * world.e_max,
            death_hook=self.apply_deaths,
            birth_hook=self.apply_births,
        )

    def apply_deaths(
        self, world: WorldState, result: StepResult, rng: np.random.Generator
    ) -> None:
        """スケジュールの死亡数だけ、生存個体から一様に選んで取り除く."""
        deaths, _ = self.schedule.at(result.step)
        for _ in range(deaths):
            living = world.living()
            if not living:
                raise InconsistencyError(
                    f"ステップ {result.step}: 個体群が空なのに強制死亡が予定されています"
                )
            victim = living[int(rng.integers(len(living)))]
            WorldService.kill(world, victim, DeathCause.FORCED, result, self.config.world)
            self.forced_deaths += 1

    def apply_births(
        self, world: WorldState, result: StepResult, rng: np.random.Generator
    ) -> None:
        """スケジュールの誕生数だけ、異なる2体をランダムに親として子を作る."""
        _, births = self.schedule.at(result.step)
        if births == 0:
            return

        # このステップで生まれた子は親候補に含めない
        born = {agent.id for agent in result.born}
        parents = [agent for agent in world.living() if agent.id not in born]
        if len(parents) < 2:
            raise InconsistencyError(
                f"ステップ {result.step}: 親候補が {len(parents)} 体しかいないため誕生を再現できません"
            )

        for _ in range(births):
            self._forced_birth(world, parents, result, rng)
            self.forced_births += 1

    def _forced_birth(
        self,
        world: WorldState,
        parents: list[Agent],
        result: StepResult,
        rng: np.random.Generator,
    ) -> None:
        """死産の場合は親を引き直す（個体数をスケジュールどおりに保つ）."""
        for attempt in range(BIRTH_ATTEMPTS):
            first, second = rng.choice(len(parents), size=2, replace=False)
            try:
                WorldService.give_birth(
                    world,
                    parents[int(first)],
                    parents[int(second)],
                    result,
                    rng,
                    self.config,
                    self.gene_map,
                    position=WorldService.random_position(rng, self.config.world),
                )
                return
            except StillbornError as e:
                logger.debug("step %d: 死産のため親を引き直します (%d): %s", result.step, attempt, e)
        raise InconsistencyError(
            f"ステップ {result.step}: {BIRTH_ATTEMPTS} 回続けて死産になり誕生を再現できません"
        )


class LockstepService:
    """ロックステップ用スケジュールの読み込みと検証."""

    @staticmethod
    def load_schedule(path: str | Path, config: RunConfig) -> tuple[LockstepSchedule, ArtifactHeader]:
        """
        駆動ランのイベントログからスケジュールを作成.

        Args:
            path: 駆動ランの events.csv
            config: ロックステップ側の設定

        Returns:
            (スケジュール, ログのヘッダ)

        Raises:
            ArtifactError: ログが読めない場合
            InconsistencyError: モード・設定ハッシュ・長さが一致しない場合
        """
        header, log = read_event_log(path)
        if header.mode != RunMode.DRIVEN:
            raise InconsistencyError(
                f"スケジュールは driven ランのログである必要があります（mode={header.mode.value}）"
            )

        expected = config_hash(config)
        if header.config_hash != expected:
            raise InconsistencyError(
                f"スケジュールの設定ハッシュが一致しません: {header.config_hash[:12]} ≠ {expected[:12]}"
            )

        steps = header.steps if header.steps is not None else log.last_step
        if steps < config.steps:
            raise InconsistencyError(
                f"スケジュールは {steps} ステップ分しかありません（必要: {config.steps}）"
            )

        schedule = LockstepSchedule.from_event_log(
            log, steps, config_hash=header.config_hash, source_hash=file_sha256(path)
        )
        logger.info(
            "スケジュール読み込み: births=%d deaths=%d (%s)",
            schedule.total_births,
            schedule.total_deaths,
            Path(path),
        )
        return schedule, header

    @staticmethod
    def lockstep_seed(driven_seed: int, config: RunConfig) -> int:
        """driven の seed に対応するロックステップ用 seed."""
        return driven_seed + config.lockstep.seed_offset
