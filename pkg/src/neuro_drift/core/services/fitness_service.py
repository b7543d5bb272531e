"""Complexity-as-fitness replacement on top of natural selection."""

import logging
from dataclasses import dataclass

import numpy as np

from ..config import RunConfig
from ..errors import StillbornError
from ..models import Agent, DeathCause, GeneMap, StepResult, WorldState
from .complexity_service import ComplexityService
from .world_service import StepRules, WorldService

logger = logging.getLogger(__name__)


@dataclass
class _PendingReplacement:
    energy: float
    parents: tuple[int, int]


@dataclass
class FitnessReplacer:
    """F ステップごとに直近 W ステップの複雑性が最も低い個体を入れ替える."""

    config: RunConfig
    gene_map: GeneMap
    seed: int
    replacements: int = 0
    suspended: int = 0
    _pending: _PendingReplacement | None = None

    def rules(self) -> StepRules:
        """自然死・自然誕生は有効のまま、置換フックを加えた規則."""
        return StepRules(death_hook=self.cull, birth_hook=self.replace)

    def window_scores(self, world: WorldState, step: int) -> dict[int, float]:
        """生存個体ごとの直近ウィンドウの複雑性（無効な個体は含めない）."""
        window = self.config.fitness.window
        rng = np.random.default_rng([self.seed, step])
        scores: dict[int, float] = {}
        for agent in world.living():
            if not agent.trace:
                continue
            recording = np.vstack(agent.trace[-window:])
            value = ComplexityService.window_complexity(
                recording, agent.brain.is_input, self.config.complexity, rng
            )
            if value is not None:
                scores[agent.id] = value
        return scores

    def cull(self, world: WorldState, result: StepResult, rng: np.random.Generator) -> None:
        """置換ステップなら複雑性最小の個体を取り除き、親を選んでおく."""
        self._pending = None
        fitness = self.config.fitness
        if result.step % fitness.interval != 0:
            return
        if world.population < fitness.min_population:
            self.suspended += 1
            logger.debug(
                "step %d: 個体数 %d のため置換を見送り", result.step, world.population
            )
            return

        scores = self.window_scores(world, result.step)
        if len(scores) < 3:
            return

        ids = sorted(scores)
        victim_id = min(ids, key=lambda i: (scores[i], i))
        candidates = [i for i in ids if i != victim_id]
        weights = np.array([max(scores[i], 0.0) for i in candidates]) + 1e-12
        chosen = rng.choice(len(candidates), size=2, replace=False, p=weights / weights.sum())

        victim = world.agents[victim_id]
        energy = victim.energy
        WorldService.kill(
            world, victim, DeathCause.REPLACED, result, self.config.world, leave_corpse=False
        )
        self._pending = _PendingReplacement(
            energy=energy,
            parents=(candidates[int(chosen[0])], candidates[int(chosen[1])]),
        )

    def replace(self, world: WorldState, result: StepResult, rng: np.random.Generator) -> None:
        """取り除いた個体のエネルギーを受け継ぐ子を作る."""
        pending, self._pending = self._pending, None
        if pending is None:
            return

        parents: list[Agent] = [world.agents[i] for i in pending.parents if i in world.agents]
        if len(parents) < 2:
            result.ledger.corpse_loss += pending.energy
            logger.debug("step %d: 親が死亡したため置換の誕生を省略", result.step)
            return

        try:
            WorldService.give_birth(
                world,
                parents[0],
                parents[1],
                result,
                rng,
                self.config,
                self.gene_map,
                energy=pending.energy,
            )
        except StillbornError as e:
            result.ledger.corpse_loss += pending.energy
            logger.debug("step %d: 置換の子が死産: %s", result.step, e)
            return
        self.replacements += 1
