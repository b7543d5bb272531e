"""World stepping: sensing, behaviors, energetics, deaths, births and food."""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from ..config import RunConfig, WorldConfig
from ..errors import StillbornError
from ..models import (
    Agent,
    DeathCause,
    Event,
    GeneMap,
    Genome,
    StepLedger,
    StepResult,
    WorldState,
)
from .brain_service import BrainService
from .genome_service import GenomeService

logger = logging.getLogger(__name__)

# (world, 途中の StepResult, 乱数) を受け取り、強制的な死亡・誕生を追加するフック
StepHook = Callable[[WorldState, StepResult, np.random.Generator], None]


@dataclass
class StepRules:
    """step_world の振る舞いを切り替える規則."""

    natural_deaths: bool = True
    natural_births: bool = True
    energy_floor: float = 0.0
    death_hook: StepHook | None = None
    birth_hook: StepHook | None = None


class WorldService:
    """2D 生態系の操作."""

    @staticmethod
    def population_pressure(pop: int, world: WorldConfig) -> float:
        """
        個体数に応じたエネルギー消耗倍率 m.

        Args:
            pop: 個体数
            world: ワールド設定

        Returns:
            m_low〜m_high の倍率
        """
        span = world.p_max - world.p_min
        fraction = min(max((pop - world.p_min) / span, 0.0), 1.0)
        return world.m_low + (world.m_high - world.m_low) * fraction

    @staticmethod
    def old_age_suppressed(pop: int, world: WorldConfig) -> bool:
        """個体数が下限以下なら老衰死を止める."""
        return pop <= world.p_min

    @staticmethod
    def ray_angles(heading: float, world: WorldConfig) -> np.ndarray:
        """視野内に均等に並べたレイの角度."""
        if world.ray_count == 1:
            return np.array([heading])
        half = math.radians(world.fov_degrees) / 2.0
        return heading + np.linspace(-half, half, world.ray_count)

    @staticmethod
    def cast_rays(
        position: np.ndarray,
        heading: float,
        centers: np.ndarray,
        radii: np.ndarray,
        colors: np.ndarray,
        world: WorldConfig,
    ) -> np.ndarray:
        """
        レイキャストで (R, 3) の色を求める.

        各レイは最も近い（中心距離）交差物体の色を、距離で線形減衰させて返す。
        """
        angles = WorldService.ray_angles(heading, world)
        result = np.zeros((angles.size, 3))
        if centers.shape[0] == 0:
            return result

        directions = np.column_stack([np.cos(angles), np.sin(angles)])
        rel = centers - position[None, :]
        dist = np.hypot(rel[:, 0], rel[:, 1])
        proj = directions @ rel.T
        perp_sq = np.maximum(dist[None, :] ** 2 - proj**2, 0.0)

        hit = (proj > 0.0) & (perp_sq <= radii[None, :] ** 2) & (dist[None, :] <= world.vision_range)
        if not hit.any():
            return result

        masked = np.where(hit, dist[None, :], np.inf)
        nearest = np.argmin(masked, axis=1)
        seen = np.isfinite(masked[np.arange(angles.size), nearest])
        attenuation = 1.0 - dist[nearest] / world.vision_range
        result[seen] = colors[nearest[seen]] * attenuation[seen, None]
        return result

    @staticmethod
    def sense(agent: Agent, world: WorldState, config: WorldConfig) -> np.ndarray:
        """
        エージェント1体の入力ベクトル.

        Returns:
            [赤 R, 緑 R, 青 R, エネルギー] の並び（値は [0, 1]）
        """
        others = [a for a in world.living() if a.id != agent.id]
        centers, radii, colors = WorldService._visible_objects(world, others, config)
        rays = WorldService.cast_rays(
            agent.position, agent.heading, centers, radii, colors, config
        )
        energy = min(max(agent.energy / config.e_max, 0.0), 1.0)
        return np.concatenate([rays[:, 0], rays[:, 1], rays[:, 2], [energy]])

    @staticmethod
    def _visible_objects(
        world: WorldState, agents: list[Agent], config: WorldConfig
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """餌（緑）とエージェント（赤=attack, 青=mate）を並べる."""
        n_food = len(world.food)
        food_colors = np.zeros((n_food, 3))
        food_colors[:, 1] = 1.0

        if agents:
            agent_centers = np.vstack([a.position for a in agents])
            agent_colors = np.array(
                [[a.brain.output("attack"), 0.0, a.brain.output("mate")] for a in agents]
            )
        else:
            agent_centers = np.zeros((0, 2))
            agent_colors = np.zeros((0, 3))

        centers = np.vstack([world.food.positions.reshape(-1, 2), agent_centers])
        radii = np.concatenate(
            [np.full(n_food, config.food_radius), np.full(len(agents), config.agent_radius)]
        )
        return centers, radii, np.vstack([food_colors, agent_colors])

    @staticmethod
    def spawn_agent(
        world: WorldState,
        genome: Genome,
        position: np.ndarray,
        heading: float,
        energy: float,
        step: int,
        rng: np.random.Generator,
        config: RunConfig,
        gene_map: GeneMap,
    ) -> Agent:
        """
        ゲノムから脳を構築してエージェントを登録.

        Raises:
            StillbornError: 脳を構築できない場合（id は消費しない）
        """
        values = GenomeService.decode(genome, gene_map)
        arch = BrainService.architecture_from_genes(
            values, GenomeService.input_group_sizes(config.world)
        )
        brain = BrainService.build_brain(arch, rng, config.brain.initial_weight_fraction)

        agent = Agent(
            id=world.allocate_id(),
            genome=genome,
            brain=brain,
            position=WorldService.clamp_position(np.asarray(position, dtype=float), config.world),
            heading=float(heading),
            energy=float(energy),
            birth_step=step,
        )
        world.agents[agent.id] = agent
        return agent

    @staticmethod
    def clamp_position(position: np.ndarray, world: WorldConfig) -> np.ndarray:
        """境界（固い壁）の内側に収める."""
        return np.array(
            [min(max(position[0], 0.0), world.width), min(max(position[1], 0.0), world.height)]
        )

    @staticmethod
    def random_position(rng: np.random.Generator, world: WorldConfig) -> np.ndarray:
        return rng.uniform((0.0, 0.0), (world.width, world.height))

    @staticmethod
    def create_world(
        config: RunConfig, rng: np.random.Generator, gene_map: GeneMap | None = None
    ) -> WorldState:
        """
        一様な種個体群と初期の餌でワールドを作成.

        Args:
            config: ラン設定
            rng: 初期条件用の乱数ストリーム
            gene_map: 遺伝子配置表

        Returns:
            ステップ0のワールド
        """
        if gene_map is None:
            gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        world_cfg = config.world
        world = WorldState(width=world_cfg.width, height=world_cfg.height)

        seed_genome = GenomeService.make_seed_genome(config, gene_map)
        for _ in range(world_cfg.initial_population):
            position = WorldService.random_position(rng, world_cfg)
            heading = rng.uniform(0.0, 2.0 * math.pi)
            WorldService.spawn_agent(
                world, seed_genome, position, heading, world_cfg.e_max, 0, rng, config, gene_map
            )

        for _ in range(world_cfg.initial_food):
            world.food.add(WorldService.random_position(rng, world_cfg), world_cfg.food_item_energy)

        logger.debug(
            "ワールド作成: agents=%d food=%d", world.population, len(world.food)
        )
        return world

    @staticmethod
    def kill(
        world: WorldState,
        agent: Agent,
        cause: DeathCause,
        result: StepResult,
        config: WorldConfig,
        leave_corpse: bool = True,
    ) -> Event:
        """エージェントを取り除き、死骸を餌に変える（leave_corpse=False なら傷だけ散逸）."""
        if leave_corpse:
            remains = agent.energy + agent.wounds
            corpse = config.corpse_fraction * remains
            result.ledger.corpse_loss += remains - corpse
            if corpse > 0.0:
                world.food.add(agent.position.copy(), corpse)
        else:
            result.ledger.damage_dissipated += agent.wounds

        agent.alive = False
        agent.energy = 0.0
        agent.wounds = 0.0
        del world.agents[agent.id]

        event = Event.death(result.step, agent.id, cause)
        result.events.append(event)
        result.died.append(agent)
        return event

    @staticmethod
    def give_birth(
        world: WorldState,
        parent1: Agent,
        parent2: Agent,
        result: StepResult,
        rng: np.random.Generator,
        config: RunConfig,
        gene_map: GeneMap,
        position: np.ndarray | None = None,
        energy: float | None = None,
    ) -> Agent:
        """
        2体の親から子を作る（交叉→突然変異、親の近くに配置）.

        energy を指定しない場合は各親がエネルギーの一定割合を寄付する。

        Raises:
            StillbornError: 子の脳を構築できない場合（親のエネルギーは変化しない）
        """
        child_genome = GenomeService.crossover(parent1.genome, parent2.genome, rng, gene_map)
        child_genome, flips = GenomeService.mutate_counted(child_genome, rng, gene_map)

        if position is None:
            midpoint = (parent1.position + parent2.position) / 2.0
            offset = rng.uniform(-config.world.agent_radius, config.world.agent_radius, size=2)
            position = midpoint + offset
        heading = rng.uniform(0.0, 2.0 * math.pi)

        donation = 0.0
        if energy is None:
            donation = config.world.birth_donation * (parent1.energy + parent2.energy)
        child = WorldService.spawn_agent(
            world,
            child_genome,
            position,
            heading,
            donation if energy is None else energy,
            result.step,
            rng,
            config,
            gene_map,
        )
        world.genetics.crossovers += 1
        world.genetics.mutations += 1
        world.genetics.flipped_bits += flips
        if energy is None:
            parent1.energy -= config.world.birth_donation * parent1.energy
            parent2.energy -= config.world.birth_donation * parent2.energy

        result.events.append(Event.birth(result.step, child.id, parent1.id, parent2.id))
        result.born.append(child)
        return child

    @staticmethod
    def step_world(
        world: WorldState,
        rng: np.random.Generator,
        config: RunConfig,
        gene_map: GeneMap,
        rules: StepRules | None = None,
    ) -> StepResult:
        """
        ワールドを1ステップ進める.

        固定の順序: 感覚 → 脳の更新 → ヘブ学習 → 記録 → 行動 → 消耗 →
        死亡 → 誕生 → 餌の再生 → ログ追記。各フェーズは id 順に処理する。

        Args:
            world: ワールド状態（直接更新される）
            rng: 乱数ストリーム
            config: ラン設定
            gene_map: 遺伝子配置表
            rules: 自然死・自然誕生の有無やフック

        Returns:
            このステップのイベントとエネルギー収支
        """
        rules = rules or StepRules()
        world_cfg = config.world
        step = world.t + 1
        result = StepResult(step=step, events=[], ledger=StepLedger())

        agents = world.living()
        start_population = len(agents)
        multiplier = WorldService.population_pressure(start_population, world_cfg)

        # 感覚は全員分を先に読む（行動前のワールドを共有）
        inputs = WorldService._sense_all(agents, world, world_cfg)

        for agent, vector in zip(agents, inputs, strict=True):
            BrainService.brain_step(agent.brain, vector)
            BrainService.hebbian_update(agent.brain)
            agent.record()
            agent.age += 1

        for agent in agents:
            WorldService._act(agent, world, result.ledger, world_cfg, rules.energy_floor)

        for agent in agents:
            WorldService._deplete(agent, multiplier, result.ledger, world_cfg, rules.energy_floor)

        if rules.natural_deaths:
            WorldService._natural_deaths(world, agents, start_population, result, world_cfg)
        if rules.death_hook is not None:
            rules.death_hook(world, result, rng)

        for agent in world.living():
            result.ledger.damage_dissipated += agent.wounds
            agent.wounds = 0.0

        if rules.natural_births:
            WorldService._natural_births(world, result, rng, config, gene_map)
        if rules.birth_hook is not None:
            rules.birth_hook(world, result, rng)

        # 子と、寄付で下限を割った親
        if rules.energy_floor > 0.0:
            for agent in world.living():
                WorldService._apply_floor(agent, result.ledger, rules.energy_floor)

        world.food.remove_empty()
        WorldService._regrow_food(world, rng, result.ledger, world_cfg)

        world.event_log.extend(result.events)
        world.t = step
        return result

    @staticmethod
    def _sense_all(
        agents: list[Agent], world: WorldState, config: WorldConfig
    ) -> list[np.ndarray]:
        """全エージェントの入力を同一のワールド状態から計算."""
        centers, radii, colors = WorldService._visible_objects(world, agents, config)
        n_food = len(world.food)
        vectors = []
        for index, agent in enumerate(agents):
            keep = np.ones(centers.shape[0], dtype=bool)
            keep[n_food + index] = False
            rays = WorldService.cast_rays(
                agent.position, agent.heading, centers[keep], radii[keep], colors[keep], config
            )
            energy = min(max(agent.energy / config.e_max, 0.0), 1.0)
            vectors.append(np.concatenate([rays[:, 0], rays[:, 1], rays[:, 2], [energy]]))
        return vectors

    @staticmethod
    def _act(
        agent: Agent,
        world: WorldState,
        ledger: StepLedger,
        config: WorldConfig,
        energy_floor: float,
    ) -> None:
        """移動・旋回・摂食・攻撃."""
        brain = agent.brain
        speed = brain.output("move") * config.v_max
        step_vector = speed * np.array([math.cos(agent.heading), math.sin(agent.heading)])
        agent.position = WorldService.clamp_position(agent.position + step_vector, config)
        agent.heading = (agent.heading + (brain.output("turn") - 0.5) * config.theta_max) % (
            2.0 * math.pi
        )

        if brain.output("eat") > config.eat_threshold and len(world.food):
            rel = world.food.positions - agent.position[None, :]
            dist = np.hypot(rel[:, 0], rel[:, 1])
            dist[world.food.energies <= 0.0] = np.inf
            nearest = int(np.argmin(dist))
            if dist[nearest] <= config.reach:
                amount = min(
                    config.bite,
                    float(world.food.energies[nearest]),
                    max(config.e_max - agent.energy, 0.0),
                )
                world.food.energies[nearest] -= amount
                agent.energy += amount
                ledger.eaten += amount

        attack = brain.output("attack")
        if attack > config.attack_threshold:
            victim = WorldService._nearest_agent(agent, world, config.reach)
            if victim is not None:
                available = max(victim.energy - energy_floor, 0.0)
                damage = min(attack * config.attack_damage, available)
                victim.energy -= damage
                victim.wounds += damage

    @staticmethod
    def _nearest_agent(agent: Agent, world: WorldState, reach: float) -> Agent | None:
        """到達範囲内で最も近い他のエージェント（同距離は id の小さい方）."""
        best: Agent | None = None
        best_dist = math.inf
        for other in world.living():
            if other.id == agent.id:
                continue
            dist = float(np.hypot(*(other.position - agent.position)))
            if dist <= reach and dist < best_dist:
                best, best_dist = other, dist
        return best

    @staticmethod
    def depletion_cost(agent: Agent, multiplier: float, config: WorldConfig) -> float:
        """1ステップ分の消耗コスト."""
        brain = agent.brain
        behaviors = (
            config.cost_move * brain.output("move")
            + config.cost_turn * brain.output("turn")
            + config.cost_eat * brain.output("eat")
            + config.cost_mate * brain.output("mate")
            + config.cost_attack * brain.output("attack")
        )
        base = (
            config.cost_fixed
            + config.cost_neuron * brain.n_neurons
            + config.cost_synapse * brain.n_synapses
        )
        return multiplier * (base + behaviors)

    @staticmethod
    def _deplete(
        agent: Agent,
        multiplier: float,
        ledger: StepLedger,
        config: WorldConfig,
        energy_floor: float,
    ) -> None:
        cost = WorldService.depletion_cost(agent, multiplier, config)
        applied = min(cost, max(agent.energy, 0.0))
        agent.energy -= applied
        ledger.depleted += applied
        if energy_floor > 0.0:
            WorldService._apply_floor(agent, ledger, energy_floor)

    @staticmethod
    def _apply_floor(agent: Agent, ledger: StepLedger, energy_floor: float) -> None:
        if agent.energy < energy_floor:
            ledger.floor_injected += energy_floor - agent.energy
            agent.energy = energy_floor

    @staticmethod
    def _natural_deaths(
        world: WorldState,
        agents: list[Agent],
        start_population: int,
        result: StepResult,
        config: WorldConfig,
    ) -> None:
        """餓死・殺害・老衰."""
        suppressed = WorldService.old_age_suppressed(start_population, config)
        for agent in agents:
            if agent.energy <= 0.0:
                cause = DeathCause.KILLED if agent.wounds > 0.0 else DeathCause.STARVATION
            elif agent.age > config.max_age and not suppressed:
                cause = DeathCause.OLD_AGE
            else:
                continue
            WorldService.kill(world, agent, cause, result, config)

    @staticmethod
    def _natural_births(
        world: WorldState,
        result: StepResult,
        rng: np.random.Generator,
        config: RunConfig,
        gene_map: GeneMap,
    ) -> None:
        """交配条件を満たす近接ペアを id 順に貪欲に組み合わせる."""
        world_cfg = config.world
        candidates = [
            agent
            for agent in world.living()
            if agent.brain.output("mate") > world_cfg.mate_threshold
            and agent.age >= world_cfg.fecundity_age
            and agent.energy > world_cfg.parent_min_energy
        ]

        paired: set[int] = set()
        for i, first in enumerate(candidates):
            if first.id in paired:
                continue
            for second in candidates[i + 1 :]:
                if second.id in paired:
                    continue
                if float(np.hypot(*(second.position - first.position))) > world_cfg.mate_distance:
                    continue
                try:
                    WorldService.give_birth(world, first, second, result, rng, config, gene_map)
                except StillbornError as e:
                    logger.debug("死産: parents=(%d, %d): %s", first.id, second.id, e)
                paired.update((first.id, second.id))
                break

    @staticmethod
    def _regrow_food(
        world: WorldState,
        rng: np.random.Generator,
        ledger: StepLedger,
        config: WorldConfig,
    ) -> None:
        """growth·(1 − 餌総量/上限) を積み立て、単位量ごとに餌を置く."""
        fill = world.food.total_energy / config.food_cap
        world.food_budget += config.food_growth * max(1.0 - fill, 0.0)
        while world.food_budget >= config.food_item_energy:
            world.food.add(WorldService.random_position(rng, config), config.food_item_energy)
            world.food_budget -= config.food_item_energy
            ledger.regrown += config.food_item_energy
