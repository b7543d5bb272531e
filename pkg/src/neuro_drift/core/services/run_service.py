"""Single-run orchestration: driven, lockstep and complexity-fitness runs."""

import logging
from collections.abc import Callable
from datetime import datetime
from pathlib import Path

import numpy as np

from ..artifacts import (
    RunDirectory,
    SnapshotWriter,
    trace_filename,
    trace_header_for,
    write_event_log,
    write_gene_map,
    write_population,
    write_trace,
)
from ..config import RunConfig, RunMode, config_hash, dump_flat_config
from ..errors import ArtifactError, NeuroDriftError
from ..models import (
    ArtifactHeader,
    DeathCause,
    EventKind,
    GeneMap,
    RunSummary,
    SnapshotHeader,
    WorldState,
)
from .fitness_service import FitnessReplacer
from .genome_service import GenomeService
from .lockstep_service import LockstepReplayer, LockstepService
from .world_service import StepRules, WorldService

logger = logging.getLogger(__name__)

# 1ステップ終了ごとに (step, population) で呼ばれる
ProgressCallback = Callable[[int, int], None]


class RunService:
    """1ラン分のシミュレーションとアーティファクト出力."""

    @staticmethod
    def default_run_dir(root: str | Path, mode: RunMode, seed: int) -> Path:
        """ランの既定の出力先."""
        return Path(root) / f"{mode.value}-seed{seed}"

    @staticmethod
    def run_driven(
        config: RunConfig,
        seed: int,
        out_dir: str | Path,
        on_step: ProgressCallback | None = None,
    ) -> RunSummary:
        """
        自然選択ランを実行.

        Args:
            config: ラン設定
            seed: 乱数 seed（初期条件とダイナミクスで同じストリームを使う）
            out_dir: 出力先ディレクトリ
            on_step: 進捗コールバック

        Returns:
            ランの集計
        """
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        rng = np.random.default_rng(seed)
        header = RunService._header(config, RunMode.DRIVEN, seed)

        def build() -> tuple[WorldState, StepRules]:
            return WorldService.create_world(config, rng, gene_map), StepRules()

        return RunService._execute(config, header, gene_map, rng, build, out_dir, on_step)

    @staticmethod
    def run_lockstep(
        config: RunConfig,
        driven_seed: int,
        schedule_path: str | Path,
        out_dir: str | Path,
        on_step: ProgressCallback | None = None,
    ) -> RunSummary:
        """
        ロックステップ（受動）ランを実行.

        初期条件は driven の seed から作り、ダイナミクスは別の seed のストリームで進める。

        Raises:
            InconsistencyError: スケジュールが設定と一致しない、または枯渇した場合
        """
        schedule, _ = LockstepService.load_schedule(schedule_path, config)
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        seed = LockstepService.lockstep_seed(driven_seed, config)
        rng = np.random.default_rng(seed)
        header = RunService._header(
            config, RunMode.LOCKSTEP, seed, schedule_hash=schedule.source_hash
        )
        replayer = LockstepReplayer(schedule=schedule, config=config, gene_map=gene_map)

        def build() -> tuple[WorldState, StepRules]:
            init_rng = np.random.default_rng(driven_seed)
            return WorldService.create_world(config, init_rng, gene_map), replayer.rules()

        summary = RunService._execute(
            config, header, gene_map, rng, build, out_dir, on_step, replayer=replayer
        )
        return summary

    @staticmethod
    def run_fitness(
        config: RunConfig,
        seed: int,
        out_dir: str | Path,
        on_step: ProgressCallback | None = None,
    ) -> RunSummary:
        """複雑性を適応度とする置換を加えた driven 型のランを実行."""
        gene_map = GenomeService.build_gene_map(config.genome, config.brain)
        rng = np.random.default_rng(seed)
        header = RunService._header(config, RunMode.COMPLEXITY_FITNESS, seed)
        replacer = FitnessReplacer(config=config, gene_map=gene_map, seed=seed)

        def build() -> tuple[WorldState, StepRules]:
            return WorldService.create_world(config, rng, gene_map), replacer.rules()

        return RunService._execute(
            config, header, gene_map, rng, build, out_dir, on_step, replacer=replacer
        )

    @staticmethod
    def _header(
        config: RunConfig, mode: RunMode, seed: int, schedule_hash: str | None = None
    ) -> ArtifactHeader:
        return ArtifactHeader(
            config_hash=config_hash(config),
            seed=seed,
            mode=mode,
            steps=config.steps,
            schedule_hash=schedule_hash,
        )

    @staticmethod
    def _execute(
        config: RunConfig,
        header: ArtifactHeader,
        gene_map: GeneMap,
        rng: np.random.Generator,
        build: Callable[[], tuple[WorldState, StepRules]],
        out_dir: str | Path,
        on_step: ProgressCallback | None,
        replayer: LockstepReplayer | None = None,
        replacer: FitnessReplacer | None = None,
    ) -> RunSummary:
        """ランを実行し、失敗時は INCOMPLETE マーカーを残す."""
        run_dir = RunDirectory(out_dir)
        started = datetime.now()
        try:
            run_dir.prepare()
            summary = RunService._simulate(
                config, header, gene_map, rng, build, run_dir, on_step, replayer, replacer
            )
        except NeuroDriftError as e:
            run_dir.mark_incomplete(str(e))
            raise
        except OSError as e:
            run_dir.mark_incomplete(str(e))
            raise ArtifactError(f"アーティファクトの書き込みに失敗しました: {e}") from e

        run_dir.write_summary(summary, started, datetime.now())
        run_dir.mark_complete()
        logger.info(
            "%s ラン完了: seed=%d births=%d deaths=%d final=%d",
            header.mode.value,
            header.seed,
            summary.births,
            sum(summary.deaths.values()),
            summary.final_population,
        )
        return summary

    @staticmethod
    def _simulate(
        config: RunConfig,
        header: ArtifactHeader,
        gene_map: GeneMap,
        rng: np.random.Generator,
        build: Callable[[], tuple[WorldState, StepRules]],
        run_dir: RunDirectory,
        on_step: ProgressCallback | None,
        replayer: LockstepReplayer | None,
        replacer: FitnessReplacer | None,
    ) -> RunSummary:
        run_dir.config.write_text(dump_flat_config(config), encoding="utf-8")
        write_gene_map(run_dir.gene_map, gene_map)

        world, rules = build()
        initial = world.population
        rows: list[tuple[int, int, int, int]] = [(0, initial, 0, 0)]
        totals = {"eaten": 0.0, "depleted": 0.0, "dissipated": 0.0, "regrown": 0.0, "floor": 0.0}
        traces_written = 0
        extinct_at: int | None = None

        snapshot_header = SnapshotHeader(
            **header.model_dump(), genome_length=config.genome.length
        )
        with SnapshotWriter(run_dir.snapshots, snapshot_header) as snapshots:
            snapshots.write(0, [agent.genome for agent in world.living()])

            for _ in range(config.steps):
                result = WorldService.step_world(world, rng, config, gene_map, rules)

                for agent in result.died:
                    trace_header = trace_header_for(agent, result.step, header)
                    write_trace(
                        run_dir.traces / trace_filename(agent.id),
                        trace_header,
                        agent.trace_matrix(),
                    )
                    agent.trace.clear()
                    traces_written += 1

                births = sum(1 for e in result.events if e.kind == EventKind.BIRTH)
                rows.append((result.step, world.population, births, len(result.events) - births))

                ledger = result.ledger
                totals["eaten"] += ledger.eaten
                totals["depleted"] += ledger.depleted
                totals["dissipated"] += ledger.damage_dissipated
                totals["regrown"] += ledger.regrown
                totals["floor"] += ledger.floor_injected

                if world.population == 0 and extinct_at is None:
                    extinct_at = result.step
                    logger.warning("step %d: 個体群が絶滅しました", result.step)

                if result.step % config.snapshot_interval == 0:
                    snapshots.write(result.step, [agent.genome for agent in world.living()])

                if on_step is not None:
                    on_step(result.step, world.population)

            snapshots_written = snapshots.written

        write_event_log(run_dir.events, header, world.event_log)
        write_population(run_dir.population, header, rows)

        log = world.event_log
        deaths = {
            cause.value: log.count(EventKind.DEATH, cause)
            for cause in DeathCause
            if log.count(EventKind.DEATH, cause)
        }
        return RunSummary(
            mode=header.mode,
            seed=header.seed,
            config_hash=header.config_hash,
            steps=config.steps,
            initial_population=initial,
            final_population=world.population,
            births=log.count(EventKind.BIRTH),
            deaths=deaths,
            forced_births=replayer.forced_births if replayer else 0,
            forced_deaths=replayer.forced_deaths if replayer else 0,
            replacements=replacer.replacements if replacer else 0,
            crossovers=world.genetics.crossovers,
            mutations=world.genetics.mutations,
            flipped_bits=world.genetics.flipped_bits,
            traces_written=traces_written,
            snapshots_written=snapshots_written,
            energy_eaten=totals["eaten"],
            energy_depleted=totals["depleted"],
            energy_dissipated=totals["dissipated"],
            energy_regrown=totals["regrown"],
            energy_floor_injected=totals["floor"],
            extinct_at=extinct_at,
        )
