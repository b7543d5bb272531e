"""Tests for world service."""

import math

import numpy as np
import pytest

from neuro_drift.core.config import RunConfig, WorldConfig
from neuro_drift.core.errors import StillbornError
from neuro_drift.core.models import BEHAVIORS, DeathCause, EventKind, StepLedger, StepResult, WorldState
from neuro_drift.core.services import BrainService, GenomeService, WorldService
from tests.factories import make_config


def empty_world(config: RunConfig) -> WorldState:
    return WorldState(width=config.world.width, height=config.world.height)


def add_agent(world, config, position, heading=0.0, energy=50.0, seed=0):
    """種ゲノムのエージェントを1体置く."""
    gene_map = GenomeService.build_gene_map(config.genome, config.brain)
    genome = GenomeService.make_seed_genome(config, gene_map)
    return WorldService.spawn_agent(
        world,
        genome,
        np.array(position, dtype=float),
        heading,
        energy,
        0,
        np.random.default_rng(seed),
        config,
        gene_map,
    )


def silence(agent) -> None:
    """重みとバイアスを 0 にして全出力を 0.5 にする."""
    agent.brain.weights[:] = 0.0
    agent.brain.bias[:] = 0.0


class TestPopulationPressure:
    """個体数圧のテスト."""

    def test_upper_clamp(self):
        """pop = P_max で m = m_high になることを確認."""
        world = WorldConfig()
        assert WorldService.population_pressure(world.p_max, world) == pytest.approx(world.m_high)
        assert WorldService.population_pressure(1000, world) == pytest.approx(world.m_high)

    def test_lower_clamp(self):
        """pop = P_min で m = m_low になることを確認."""
        world = WorldConfig()
        assert WorldService.population_pressure(world.p_min, world) == pytest.approx(world.m_low)
        assert WorldService.population_pressure(0, world) == pytest.approx(world.m_low)

    def test_linear_midpoint(self):
        """中間の個体数で m = 2 になることを確認."""
        world = WorldConfig(p_min=30, p_max=120, m_low=1.0, m_high=3.0)
        assert WorldService.population_pressure(75, world) == pytest.approx(2.0)

    def test_old_age_suppressed_at_lower_bound(self):
        """個体数が下限以下なら老衰が止まることを確認."""
        world = WorldConfig()
        assert WorldService.old_age_suppressed(world.p_min, world)
        assert not WorldService.old_age_suppressed(world.p_min + 1, world)


class TestSense:
    """感覚入力のテスト."""

    def test_empty_world(self):
        """何も無いワールドでは色入力が 0、エネルギー入力が energy/e_max になることを確認."""
        config = RunConfig()
        world = empty_world(config)
        agent = add_agent(world, config, (50.0, 50.0), energy=40.0)

        inputs = WorldService.sense(agent, world, config.world)

        assert inputs.shape == (3 * config.world.ray_count + 1,)
        assert np.all(inputs[:-1] == 0.0)
        assert inputs[-1] == pytest.approx(0.4)

    def test_food_dead_ahead_at_half_range(self):
        """正面の半分の距離にある餌で中央レイの緑が 0.5 になることを確認."""
        config = RunConfig.model_validate({"world": {"ray_count": 9}})
        world = empty_world(config)
        agent = add_agent(world, config, (50.0, 50.0), heading=0.0)
        world.food.add(np.array([50.0 + config.world.vision_range / 2, 50.0]), 10.0)

        inputs = WorldService.sense(agent, world, config.world)

        rays = 9
        red, green, blue = inputs[:rays], inputs[rays : 2 * rays], inputs[2 * rays : 3 * rays]
        assert green[4] == pytest.approx(0.5)
        assert red[4] == 0.0
        assert blue[4] == 0.0
        assert np.count_nonzero(green) == 1

    def test_object_behind_is_invisible(self):
        """背後の物体は見えないことを確認."""
        config = RunConfig()
        world = empty_world(config)
        agent = add_agent(world, config, (50.0, 50.0), heading=0.0)
        world.food.add(np.array([40.0, 50.0]), 10.0)

        inputs = WorldService.sense(agent, world, config.world)

        assert np.all(inputs[:-1] == 0.0)

    def test_agents_are_red_by_attack(self):
        """他のエージェントが攻撃出力に比例した赤で見えることを確認."""
        config = RunConfig.model_validate({"world": {"ray_count": 9}})
        world = empty_world(config)
        viewer = add_agent(world, config, (50.0, 50.0), heading=0.0)
        other = add_agent(world, config, (65.0, 50.0))
        other.brain.activations[other.brain.output_indices[BEHAVIORS.index("attack")]] = 0.8
        other.brain.activations[other.brain.output_indices[BEHAVIORS.index("mate")]] = 0.2

        inputs = WorldService.sense(viewer, world, config.world)

        assert inputs[4] == pytest.approx(0.8 * 0.5)
        assert inputs[18 + 4] == pytest.approx(0.2 * 0.5)

    def test_nearest_object_wins(self):
        """同じレイ上では近い物体の色が返ることを確認."""
        config = RunConfig.model_validate({"world": {"ray_count": 1}})
        world = empty_world(config)
        viewer = add_agent(world, config, (10.0, 10.0), heading=0.0)
        world.food.add(np.array([16.0, 10.0]), 10.0)
        other = add_agent(world, config, (25.0, 10.0))
        other.brain.activations[other.brain.output_indices[BEHAVIORS.index("attack")]] = 1.0

        inputs = WorldService.sense(viewer, world, config.world)

        assert inputs[0] == 0.0
        assert inputs[1] == pytest.approx(1.0 - 6.0 / config.world.vision_range)


class TestStepWorld:
    """ステップ更新のテスト."""

    def test_silent_brain_drifts_at_half_speed(self):
        """出力が全て 0.5 の個体は何もせず半分の速さで進むことを確認."""
        config = RunConfig()
        world = empty_world(config)
        agent = add_agent(world, config, (50.0, 50.0), heading=0.0)
        silence(agent)

        gene_map = GenomeService.build_gene_map(config.genome, config.brain)

        result = WorldService.step_world(world, np.random.default_rng(0), config, gene_map)

        assert result.events == []
        assert agent.position == pytest.approx([50.0 + 0.5 * config.world.v_max, 50.0])
        assert agent.heading == pytest.approx(0.0)
        assert agent.age == 1
        assert len(agent.trace) == 1

    def test_collocated_mating_pair_gives_one_birth(self):
        """交配条件を満たす重なった2体から誕生がちょうど1件起きることを確認."""
        config = RunConfig()
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        world = empty_world(config)
        parents = [add_agent(world, config, (50.0, 50.0), energy=80.0, seed=i) for i in range(2)]
        for parent in parents:
            silence(parent)
            parent.brain.bias[parent.brain.output_indices[BEHAVIORS.index("mate")]] = math.log(9.0)
            parent.age = config.world.fecundity_age + 5
        expected_id = world.next_id

        result = WorldService.step_world(world, np.random.default_rng(1), config, gene_map)

        births = [e for e in result.events if e.kind == EventKind.BIRTH]
        assert len(births) == 1
        assert births[0].agent_id == expected_id
        assert {births[0].parent1, births[0].parent2} == {p.id for p in parents}
        child = world.agents[expected_id]
        assert child.energy == pytest.approx((parents[0].energy + parents[1].energy) / 3.0)
        assert world.genetics.crossovers == 1

    def test_starvation(self):
        """エネルギーが尽きた個体が餓死として記録されることを確認."""
        config = RunConfig()
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        world = empty_world(config)
        agent = add_agent(world, config, (50.0, 50.0), energy=1e-6)

        result = WorldService.step_world(world, np.random.default_rng(2), config, gene_map)

        assert [e.cause for e in result.events] == [DeathCause.STARVATION]
        assert agent.id not in world.agents
        assert result.died == [agent]

    def test_old_age_only_above_lower_bound(self):
        """老衰は個体数が下限を超えるときだけ起きることを確認."""
        config = make_config(p_min=2, p_max=30)
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)

        world = empty_world(config)
        agents = [add_agent(world, config, (5.0 + 10 * i, 20.0), seed=i) for i in range(3)]
        agents[0].age = config.world.max_age
        result = WorldService.step_world(world, np.random.default_rng(3), config, gene_map)
        assert DeathCause.OLD_AGE in [e.cause for e in result.events]

        world = empty_world(config)
        agents = [add_agent(world, config, (5.0 + 10 * i, 20.0), seed=i) for i in range(2)]
        agents[0].age = config.world.max_age
        result = WorldService.step_world(world, np.random.default_rng(3), config, gene_map)
        assert DeathCause.OLD_AGE not in [e.cause for e in result.events]

    def test_empty_world_keeps_growing_food(self):
        """エージェントがいなくても餌のダイナミクスが進むことを確認."""
        config = make_config(initial_population=0, initial_food=0)
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        rng = np.random.default_rng(4)
        world = WorldService.create_world(config, rng, gene_map)

        for _ in range(10):
            WorldService.step_world(world, rng, config, gene_map)

        assert world.t == 10
        assert len(world.food) > 0

    def test_closed_system_energy_audit(self):
        """κ=1・再生なしで総エネルギーの減少が消耗と散逸の和に一致することを確認."""
        config = make_config(corpse_fraction=1.0, food_growth=0.0)
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        rng = np.random.default_rng(6)
        world = WorldService.create_world(config, rng, gene_map)

        for _ in range(80):
            before = world.total_energy()
            result = WorldService.step_world(world, rng, config, gene_map)
            ledger = result.ledger
            expected = before - ledger.depleted - ledger.damage_dissipated
            assert world.total_energy() == pytest.approx(expected, abs=1e-9 * config.world.e_max)
            assert ledger.corpse_loss == pytest.approx(0.0, abs=1e-12)

    def test_energy_ledger_with_regrowth(self):
        """既定の κ と再生ありでもエネルギー収支が帳尻を合わせることを確認."""
        config = make_config()
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        rng = np.random.default_rng(7)
        world = WorldService.create_world(config, rng, gene_map)

        for _ in range(80):
            before = world.total_energy()
            ledger = WorldService.step_world(world, rng, config, gene_map).ledger
            expected = (
                before
                - ledger.depleted
                - ledger.damage_dissipated
                - ledger.corpse_loss
                + ledger.regrown
                + ledger.floor_injected
            )
            assert world.total_energy() == pytest.approx(expected, abs=1e-8)

    def test_energy_never_exceeds_maximum(self):
        """エネルギーが e_max を超えないことを確認."""
        config = make_config()
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        rng = np.random.default_rng(8)
        world = WorldService.create_world(config, rng, gene_map)

        for _ in range(60):
            WorldService.step_world(world, rng, config, gene_map)
            for agent in world.living():
                assert 0.0 <= agent.energy <= config.world.e_max + 1e-9

    def test_event_log_replays_population(self):
        """イベントログから各ステップの個体数が再現できることを確認."""
        config = make_config()
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        rng = np.random.default_rng(9)
        world = WorldService.create_world(config, rng, gene_map)
        initial = world.population

        populations = [initial]
        for _ in range(60):
            WorldService.step_world(world, rng, config, gene_map)
            populations.append(world.population)

        series = world.event_log.population_series(initial, 60)
        assert [row[1] for row in series] == populations

    def test_deaths_precede_births_within_step(self):
        """ステップ内では死亡が誕生より先に記録されることを確認."""
        config = make_config()
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        rng = np.random.default_rng(10)
        world = WorldService.create_world(config, rng, gene_map)

        for _ in range(60):
            WorldService.step_world(world, rng, config, gene_map)

        for events in world.event_log.by_step().values():
            kinds = [e.kind for e in events]
            assert kinds == sorted(kinds, key=lambda k: k != EventKind.DEATH)

    def test_same_seed_same_log(self):
        """同じ seed から同じイベントログができることを確認."""
        config = make_config()
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)

        logs = []
        for _ in range(2):
            rng = np.random.default_rng(11)
            world = WorldService.create_world(config, rng, gene_map)
            for _ in range(40):
                WorldService.step_world(world, rng, config, gene_map)
            logs.append([e.model_dump() for e in world.event_log])

        assert logs[0] == logs[1]


class TestKill:
    """死亡処理のテスト."""

    def test_corpse_carries_fraction_of_energy_and_wounds(self):
        """死骸が κ·(エネルギー + 傷) を持つことを確認."""
        config = RunConfig()
        world = empty_world(config)
        agent = add_agent(world, config, (10.0, 10.0), energy=40.0)
        agent.wounds = 10.0
        result = StepResult(step=1, events=[], ledger=StepLedger())

        WorldService.kill(world, agent, DeathCause.KILLED, result, config.world)

        kappa = config.world.corpse_fraction
        assert world.food.energies.tolist() == pytest.approx([kappa * 50.0])
        assert result.ledger.corpse_loss == pytest.approx((1 - kappa) * 50.0)
        assert not agent.alive

    def test_kill_without_corpse_dissipates_wounds(self):
        """死骸を残さない場合は傷が散逸として記録されることを確認."""
        config = RunConfig()
        world = empty_world(config)
        agent = add_agent(world, config, (10.0, 10.0), energy=40.0)
        agent.wounds = 5.0
        result = StepResult(step=1, events=[], ledger=StepLedger())

        WorldService.kill(
            world, agent, DeathCause.REPLACED, result, config.world, leave_corpse=False
        )

        assert len(world.food) == 0
        assert result.ledger.damage_dissipated == pytest.approx(5.0)


class TestGiveBirth:
    """誕生処理のテスト."""

    def test_stillbirth_leaves_counters_and_parents(self, monkeypatch):
        """死産のときは遺伝的操作の回数も親のエネルギーも変わらないことを確認."""
        config = RunConfig()
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        world = empty_world(config)
        parents = [add_agent(world, config, (50.0, 50.0), energy=80.0, seed=i) for i in range(2)]
        result = StepResult(step=1, events=[], ledger=StepLedger())

        def stillborn(*args, **kwargs):
            raise StillbornError("処理ニューロンが0個の構造です")

        monkeypatch.setattr(BrainService, "build_brain", staticmethod(stillborn))

        with pytest.raises(StillbornError):
            WorldService.give_birth(
                world, *parents, result, np.random.default_rng(0), config, gene_map
            )

        assert world.genetics.crossovers == 0
        assert world.genetics.mutations == 0
        assert world.genetics.flipped_bits == 0
        assert [p.energy for p in parents] == [80.0, 80.0]
        assert result.events == []

    def test_counters_follow_successful_births(self):
        """成功した誕生ごとに交叉と突然変異が1回ずつ数えられることを確認."""
        config = RunConfig()
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        world = empty_world(config)
        parents = [add_agent(world, config, (50.0, 50.0), energy=80.0, seed=i) for i in range(2)]
        result = StepResult(step=1, events=[], ledger=StepLedger())
        rng = np.random.default_rng(0)

        for _ in range(3):
            WorldService.give_birth(world, *parents, result, rng, config, gene_map)

        assert world.genetics.crossovers == 3
        assert world.genetics.mutations == 3
        assert len(result.born) == 3


class TestPopulationDynamics:
    """既定値での個体群の動態のテスト."""

    def test_seed_agents_want_to_eat_and_mate(self):
        """種個体の eat と mate の出力がしきい値を上回ることを確認."""
        config = RunConfig()
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        rng = np.random.default_rng(0)
        world = WorldService.create_world(config, rng, gene_map)

        WorldService.step_world(world, rng, config, gene_map)

        for agent in world.living():
            assert agent.brain.output("eat") > config.world.eat_threshold
            assert agent.brain.output("mate") > config.world.mate_threshold

    def test_mating_within_overlapping_reach(self):
        """reach の円が重なる距離なら離れていても交配することを確認."""
        config = RunConfig()
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        world = empty_world(config)
        gap = 1.5 * config.world.reach
        parents = [
            add_agent(world, config, (50.0, 50.0), heading=math.pi / 2, energy=80.0, seed=0),
            add_agent(world, config, (50.0 + gap, 50.0), heading=math.pi / 2, energy=80.0, seed=1),
        ]
        for parent in parents:
            silence(parent)
            parent.brain.bias[parent.brain.output_indices[BEHAVIORS.index("mate")]] = math.log(9.0)
            parent.age = config.world.fecundity_age

        result = WorldService.step_world(world, np.random.default_rng(2), config, gene_map)

        assert [e.kind for e in result.events] == [EventKind.BIRTH]

    def test_desk_run_keeps_breeding(self):
        """デスク規模のランで誕生が起き、最後まで個体群が残ることを確認."""
        config = RunConfig(world=WorldConfig(p_min=20, p_max=60))
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        rng = np.random.default_rng(0)
        world = WorldService.create_world(config, rng, gene_map)

        for _ in range(400):
            WorldService.step_world(world, rng, config, gene_map)

        births = world.event_log.count(EventKind.BIRTH)
        assert births > 0
        assert world.population > 0
        assert world.genetics.crossovers == births

    @pytest.mark.slow
    def test_seed_genome_cannot_hold_upper_bound_without_evolution(self):
        """突然変異なしの種個体群は上限の個体数を保てないことを確認."""
        config = RunConfig.model_validate(
            {
                "genome": {"rate_min": 0.0, "seed_mutation_rate": 0.0},
                "world": {"p_min": 20, "p_max": 60, "initial_population": 60},
            }
        )
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        seed_genome = GenomeService.make_seed_genome(config, gene_map)
        rng = np.random.default_rng(0)
        world = WorldService.create_world(config, rng, gene_map)

        populations = []
        for _ in range(2000):
            WorldService.step_world(world, rng, config, gene_map)
            populations.append(world.population)

        assert world.genetics.flipped_bits == 0
        assert all(agent.genome == seed_genome for agent in world.living())
        assert populations[-1] < config.world.initial_population
        assert np.mean(populations[-500:]) < config.world.initial_population
