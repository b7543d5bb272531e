"""Tests for manifest service."""

import pytest

from neuro_drift.core.config import RunMode
from neuro_drift.core.errors import ArtifactError, InconsistencyError
from neuro_drift.core.models import RunStatus
from neuro_drift.core.services import ManifestService
from neuro_drift.core.services.manifest_service import pair_dir
from tests.factories import make_config


class TestManifestService:
    """マニフェスト管理のテスト."""

    def test_create(self, tmp_path, small_config):
        """ペアごとに driven/lockstep のランが登録されることを確認."""
        manifest = ManifestService.create_or_resume(tmp_path, 3, 100, small_config)

        assert manifest.n_pairs == 3
        assert len(manifest.runs) == 6
        driven, lockstep = manifest.pair(2)
        assert driven.seed == 102
        assert lockstep.seed == 102 + small_config.lockstep.seed_offset
        assert driven.path == pair_dir(tmp_path.resolve(), 2) / "driven"
        assert driven.run_id == "pair_002-driven"
        assert lockstep.run_id == "pair_002-lockstep"
        assert all(run.status == RunStatus.PENDING for run in manifest.runs)

    def test_resume_same_conditions(self, tmp_path, small_config):
        """同じ条件なら既存のマニフェストを再開用に返すことを確認."""
        first = ManifestService.create_or_resume(tmp_path, 2, 0, small_config)
        ManifestService.update_run(tmp_path, 0, RunMode.DRIVEN, RunStatus.COMPLETE, "f" * 64)

        resumed = ManifestService.create_or_resume(tmp_path, 2, 0, small_config)

        assert resumed.id == first.id
        assert resumed.pair(0)[0].status == RunStatus.COMPLETE
        assert resumed.pair(0)[0].schedule_hash == "f" * 64

    def test_resume_with_different_conditions(self, tmp_path, small_config):
        """条件の異なるランセットを同じ場所に作れないことを確認."""
        ManifestService.create_or_resume(tmp_path, 2, 0, small_config)

        with pytest.raises(InconsistencyError, match="条件の異なる"):
            ManifestService.create_or_resume(tmp_path, 3, 0, small_config)
        with pytest.raises(InconsistencyError):
            ManifestService.create_or_resume(tmp_path, 2, 0, make_config(steps=99))

    def test_update_and_completed_pairs(self, tmp_path, small_config):
        """両方が完了したペアだけが completed_pairs に入ることを確認."""
        ManifestService.create_or_resume(tmp_path, 2, 0, small_config)
        for mode in (RunMode.DRIVEN, RunMode.LOCKSTEP):
            ManifestService.update_run(tmp_path, 0, mode, RunStatus.COMPLETE)
        ManifestService.update_run(tmp_path, 1, RunMode.DRIVEN, RunStatus.COMPLETE)
        ManifestService.update_run(tmp_path, 1, RunMode.LOCKSTEP, RunStatus.FAILED, error="boom")

        manifest = ManifestService.load(tmp_path)

        assert [d.pair_index for d, _ in manifest.completed_pairs()] == [0]
        assert manifest.pair(1)[1].error == "boom"

    def test_load_missing(self, tmp_path):
        """マニフェストが無い場所を読むとエラーになることを確認."""
        with pytest.raises(ArtifactError, match="マニフェストが見つかりません"):
            ManifestService.load(tmp_path)

    def test_update_unknown_run(self, tmp_path, small_config):
        """存在しないランの更新でエラーになることを確認."""
        ManifestService.create_or_resume(tmp_path, 1, 0, small_config)
        with pytest.raises(ArtifactError, match="ありません"):
            ManifestService.update_run(tmp_path, 5, RunMode.DRIVEN, RunStatus.COMPLETE)
