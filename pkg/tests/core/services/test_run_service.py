"""Tests for run service."""

import pytest

from neuro_drift.core.artifacts import (
    RunDirectory,
    file_sha256,
    iter_traces,
    parse_comment_header,
    read_event_log,
    read_population,
    read_snapshots,
    read_trace,
)
from neuro_drift.core.config import RunMode
from neuro_drift.core.errors import InconsistencyError
from neuro_drift.core.models import DeathCause, EventKind
from neuro_drift.core.services import RunService
from tests.factories import make_config


class TestRunDriven:
    """自然選択ランのテスト."""

    def test_writes_all_artifacts(self, tmp_path, small_config):
        """ランディレクトリに全アーティファクトと完了マーカーが出ることを確認."""
        out = tmp_path / "driven"

        summary = RunService.run_driven(small_config, 1, out)

        run_dir = RunDirectory(out)
        for path in (
            run_dir.events,
            run_dir.population,
            run_dir.snapshots,
            run_dir.gene_map,
            run_dir.config,
            run_dir.summary,
        ):
            assert path.exists(), path
        assert run_dir.is_complete()
        assert summary.mode == RunMode.DRIVEN
        assert summary.steps == small_config.steps
        assert run_dir.read_summary() == summary

    def test_population_file_matches_event_log(self, tmp_path, small_config):
        """個体数ファイルがイベントログから再構成した系列と一致することを確認."""
        out = tmp_path / "driven"
        summary = RunService.run_driven(small_config, 2, out)

        _, log = read_event_log(out / "events.csv")
        _, frame = read_population(out / "population.csv")

        rebuilt = log.population_series(summary.initial_population, small_config.steps)
        assert [tuple(row) for row in frame.itertuples(index=False)] == rebuilt
        assert frame["population"].iloc[-1] == summary.final_population

    def test_one_trace_per_death(self, tmp_path, small_config):
        """死亡したエージェントごとにトレースが1つ書かれることを確認."""
        out = tmp_path / "driven"
        summary = RunService.run_driven(small_config, 3, out)

        _, log = read_event_log(out / "events.csv")
        dead = [e.agent_id for e in log if e.kind == EventKind.DEATH]
        traces = list(iter_traces(out / "traces"))

        assert len(traces) == len(dead) == summary.traces_written
        for path in traces:
            header, matrix = read_trace(path)
            assert header.agent_id in dead
            assert matrix.shape == (header.rows, header.n_total)
            assert header.rows == header.death_step - header.birth_step
            assert len(header.roles) == header.n_total

    def test_snapshots_cover_interval(self, tmp_path, small_config):
        """スナップショットがステップ0と間隔ごとに書かれることを確認."""
        out = tmp_path / "driven"
        RunService.run_driven(small_config, 4, out)

        header, blocks = read_snapshots(out / "snapshots.bin")

        assert header.genome_length == small_config.genome.length
        assert [step for step, _ in blocks] == [0, 20, 40, 60]
        assert blocks[0][1].shape == (small_config.world.initial_population, small_config.genome.length)

    def test_same_seed_same_bytes(self, tmp_path, small_config):
        """同じ設定と seed から同一バイトのアーティファクトができることを確認."""
        first = RunDirectory(tmp_path / "a")
        second = RunDirectory(tmp_path / "b")
        RunService.run_driven(small_config, 5, first.path)
        RunService.run_driven(small_config, 5, second.path)

        for name in ("events.csv", "population.csv", "snapshots.bin", "gene_map.csv", "config.cfg"):
            assert file_sha256(first.path / name) == file_sha256(second.path / name), name
        first_traces = [p.name for p in iter_traces(first.traces)]
        assert first_traces == [p.name for p in iter_traces(second.traces)]
        for name in first_traces:
            assert file_sha256(first.traces / name) == file_sha256(second.traces / name)

    def test_different_seed_differs(self, tmp_path, small_config):
        """seed が違えばイベントログも変わることを確認."""
        RunService.run_driven(small_config, 6, tmp_path / "a")
        RunService.run_driven(small_config, 7, tmp_path / "b")
        assert file_sha256(tmp_path / "a" / "events.csv") != file_sha256(tmp_path / "b" / "events.csv")

    def test_rerun_replaces_stale_traces(self, tmp_path, small_config):
        """同じ出力先で再実行すると前回のトレースが残らないことを確認."""
        out = tmp_path / "driven"
        (out / "traces").mkdir(parents=True)
        (out / "traces" / "agent_999999.trace").write_bytes(b"stale")

        RunService.run_driven(small_config, 8, out)

        assert not (out / "traces" / "agent_999999.trace").exists()

    def test_progress_callback(self, tmp_path, small_config):
        """進捗コールバックが毎ステップ呼ばれることを確認."""
        calls = []
        RunService.run_driven(small_config, 9, tmp_path / "d", on_step=lambda s, p: calls.append(s))
        assert calls == list(range(1, small_config.steps + 1))

    def test_default_run_dir(self, tmp_path):
        """既定の出力先がモードと seed から決まることを確認."""
        assert RunService.default_run_dir(tmp_path, RunMode.DRIVEN, 3) == tmp_path / "driven-seed3"


class TestRunLockstep:
    """ロックステップランのテスト."""

    def test_population_identical_to_driven(self, tmp_path, small_config):
        """ロックステップの個体数が各ステップで駆動ランと一致することを確認."""
        driven = tmp_path / "driven"
        lockstep = tmp_path / "lockstep"
        RunService.run_driven(small_config, 11, driven)

        summary = RunService.run_lockstep(small_config, 11, driven / "events.csv", lockstep)

        _, driven_pop = read_population(driven / "population.csv")
        _, lockstep_pop = read_population(lockstep / "population.csv")
        assert driven_pop["population"].tolist() == lockstep_pop["population"].tolist()
        assert driven_pop["births"].tolist() == lockstep_pop["births"].tolist()
        assert driven_pop["deaths"].tolist() == lockstep_pop["deaths"].tolist()
        assert summary.seed == 11 + small_config.lockstep.seed_offset

    def test_consumed_schedule_hash(self, tmp_path, small_config):
        """ロックステップのヘッダに消費したログの SHA-256 が記録されることを確認."""
        driven = tmp_path / "driven"
        lockstep = tmp_path / "lockstep"
        RunService.run_driven(small_config, 12, driven)
        RunService.run_lockstep(small_config, 12, driven / "events.csv", lockstep)

        with open(lockstep / "events.csv", encoding="utf-8") as f:
            header = parse_comment_header(f.readline().strip(), lockstep / "events.csv")

        assert header.mode == RunMode.LOCKSTEP
        assert header.schedule_hash == file_sha256(driven / "events.csv")

    def test_only_forced_deaths(self, tmp_path, small_config):
        """ロックステップの死亡はすべて強制死亡であることを確認."""
        driven = tmp_path / "driven"
        RunService.run_driven(small_config, 13, driven)
        RunService.run_lockstep(small_config, 13, driven / "events.csv", tmp_path / "lockstep")

        _, log = read_event_log(tmp_path / "lockstep" / "events.csv")
        assert {e.cause for e in log if e.kind == EventKind.DEATH} <= {DeathCause.FORCED}

    def test_deterministic(self, tmp_path, small_config):
        """同じ入力から同一バイトのロックステップランができることを確認."""
        driven = tmp_path / "driven"
        RunService.run_driven(small_config, 14, driven)
        RunService.run_lockstep(small_config, 14, driven / "events.csv", tmp_path / "a")
        RunService.run_lockstep(small_config, 14, driven / "events.csv", tmp_path / "b")

        for name in ("events.csv", "population.csv", "snapshots.bin"):
            assert file_sha256(tmp_path / "a" / name) == file_sha256(tmp_path / "b" / name)

    def test_config_mismatch_marks_incomplete(self, tmp_path, small_config):
        """設定が異なるスケジュールではランが完了しないことを確認."""
        driven = tmp_path / "driven"
        RunService.run_driven(small_config, 15, driven)
        other = make_config(initial_population=9)

        with pytest.raises(InconsistencyError):
            RunService.run_lockstep(other, 15, driven / "events.csv", tmp_path / "lockstep")

        assert not RunDirectory(tmp_path / "lockstep").is_complete()


class TestRunFitness:
    """複雑性適応度ランのテスト."""

    def test_fitness_run_completes(self, tmp_path):
        """置換付きのランが完了し、置換が死因として記録されることを確認."""
        config = make_config(steps=80)
        config.fitness.interval = 20
        config.fitness.window = 40
        out = tmp_path / "fitness"

        summary = RunService.run_fitness(config, 21, out)

        assert RunDirectory(out).is_complete()
        assert summary.mode == RunMode.COMPLEXITY_FITNESS
        _, log = read_event_log(out / "events.csv")
        assert log.count(EventKind.DEATH, DeathCause.REPLACED) == summary.replacements
