"""Desk-scale acceptance experiments (``pytest -m slow``)."""

import time

import pytest

from neuro_drift.core.artifacts import RunDirectory, read_event_log, read_population, read_snapshots
from neuro_drift.core.config import RunConfig, WorldConfig
from neuro_drift.core.models import DeathCause, EventKind
from neuro_drift.core.services import AnalysisService, PairsetService, ReportService, RunService

pytestmark = pytest.mark.slow


def desk_config(steps: int) -> RunConfig:
    """デスクトップ規模の設定."""
    return RunConfig(steps=steps, world=WorldConfig(p_min=20, p_max=60))


def run_pair(config: RunConfig, seed: int, root) -> tuple[RunDirectory, RunDirectory]:
    driven = RunDirectory(root / f"pair_{seed:03d}" / "driven")
    lockstep = RunDirectory(root / f"pair_{seed:03d}" / "lockstep")
    RunService.run_driven(config, seed, driven.path)
    RunService.run_lockstep(config, seed, driven.events, lockstep.path)
    return driven, lockstep


def final_snapshot(run_dir: RunDirectory):
    """個体が残っている最後のスナップショット."""
    _, snapshots = read_snapshots(run_dir.snapshots)
    populated = [(step, bits) for step, bits in snapshots if len(bits) > 0]
    assert populated, f"個体のいるスナップショットがありません: {run_dir.snapshots}"
    step, bits = populated[-1]
    assert step == snapshots[-1][0], f"ステップ {snapshots[-1][0]} までに絶滅しました"
    return bits


class TestDeskScale:
    """デスクトップ規模の受け入れ実験."""

    def test_lockstep_identity(self, tmp_path):
        """3組で lockstep の個体数が driven と毎ステップ一致することを確認."""
        config = desk_config(5000)
        for seed in range(3):
            driven, lockstep = run_pair(config, seed, tmp_path)
            _, driven_pop = read_population(driven.population)
            _, lockstep_pop = read_population(lockstep.population)
            assert driven_pop["population"].tolist() == lockstep_pop["population"].tolist()

            _, schedule = read_event_log(driven.events)
            _, replay = read_event_log(lockstep.events)
            assert replay.count(EventKind.BIRTH) == schedule.count(EventKind.BIRTH)
            assert replay.count(EventKind.DEATH, DeathCause.FORCED) == schedule.count(
                EventKind.DEATH
            )

    def test_passive_drift(self, tmp_path):
        """長い lockstep ランでビット頻度が 0.5 付近に、GC が L の1割未満になることを確認."""
        config = desk_config(15000)
        _, lockstep = run_pair(config, 0, tmp_path)
        bits = final_snapshot(lockstep)
        assert 0.45 <= AnalysisService.bit_frequency(bits) <= 0.55
        gc, _ = AnalysisService.genomic_consistency(bits)
        assert gc < 0.1 * config.genome.length

    def test_driven_consistency(self, tmp_path):
        """3組中2組以上で driven の最終 GC が lockstep を上回ることを確認."""
        config = desk_config(5000)
        wins = 0
        for seed in range(3):
            driven, lockstep = run_pair(config, seed, tmp_path)
            gc_driven, _ = AnalysisService.genomic_consistency(final_snapshot(driven))
            gc_lockstep, _ = AnalysisService.genomic_consistency(final_snapshot(lockstep))
            wins += gc_driven > gc_lockstep
        assert wins >= 2

    def test_early_driven_advantage(self, tmp_path):
        """10組・10,000 ステップで、前半の隣り合う2ビンが driven 優位で T* を超えることを確認."""
        config = desk_config(10000)
        manifest = PairsetService.run_pairset(config, tmp_path, 10, 0, workers=4)
        assert len(manifest.completed_pairs()) == 10

        report = ReportService.analyze(tmp_path, workers=4)

        series = report.t_series
        assert 9 in series.df
        hits = ReportService.significant_bins(series)
        width = config.analysis.bin_width
        early = [end for end in hits if end <= config.steps // 2]
        assert any(end + width in early for end in early), f"T* を超えたビン: {hits}"

    def test_driven_throughput(self, tmp_path):
        """60体以下の 5,000 ステップの driven ランが5分以内に終わり、個体群が続くことを確認."""
        config = desk_config(5000)

        started = time.perf_counter()
        summary = RunService.run_driven(config, 0, tmp_path / "driven")
        elapsed = time.perf_counter() - started

        assert elapsed < 300.0
        assert summary.births > 0
        assert 0 < summary.final_population <= config.world.p_max
        _, population = read_population(RunDirectory(tmp_path / "driven").population)
        assert population["population"].max() <= 60
