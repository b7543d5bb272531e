"""Run-set manifest stored in ``manifest.db``."""

from pathlib import Path

from sqlalchemy.orm import Session

from ..config import RunConfig, RunMode, config_hash
from ..database import RunDB, RunSetDB, open_manifest
from ..errors import ArtifactError, InconsistencyError
from ..models import RunRecord, RunSetManifest, RunStatus


def pair_dir(root: str | Path, index: int) -> Path:
    """ペア index のディレクトリ."""
    return Path(root) / f"pair_{index:03d}"


class ManifestService:
    """ランセットのマニフェスト管理."""

    @staticmethod
    def create_or_resume(
        root: str | Path, n_pairs: int, base_seed: int, config: RunConfig
    ) -> RunSetManifest:
        """
        ランセットを作成、または既存のものを再開用に読み込む.

        Args:
            root: ランセットのルートディレクトリ
            n_pairs: ペア数
            base_seed: 基準 seed（ペア i は base_seed + i）
            config: ラン設定

        Returns:
            マニフェスト

        Raises:
            InconsistencyError: 既存のランセットと条件が異なる場合
        """
        root = Path(root).resolve()
        digest = config_hash(config)
        with open_manifest(root, create=True) as manager, manager.get_session() as session:
            run_set = session.query(RunSetDB).first()
            if run_set is not None:
                expected = (run_set.n_pairs, run_set.base_seed, run_set.config_hash)
                if expected != (n_pairs, base_seed, digest):
                    raise InconsistencyError(
                        f"{root} には条件の異なるランセットが既にあります"
                        f"（pairs={run_set.n_pairs}, seed={run_set.base_seed}）"
                    )
                return ManifestService._db_to_model(run_set)

            run_set = RunSetDB(
                root=str(root), n_pairs=n_pairs, base_seed=base_seed, config_hash=digest
            )
            session.add(run_set)
            session.flush()

            offset = config.lockstep.seed_offset
            for index in range(n_pairs):
                directory = pair_dir(root, index)
                for mode, seed in (
                    (RunMode.DRIVEN, base_seed + index),
                    (RunMode.LOCKSTEP, base_seed + index + offset),
                ):
                    session.add(
                        RunDB(
                            run_set_id=run_set.id,
                            pair_index=index,
                            mode=mode.value,
                            seed=seed,
                            path=str(directory / mode.value),
                        )
                    )
            session.flush()
            session.refresh(run_set)
            return ManifestService._db_to_model(run_set)

    @staticmethod
    def load(root: str | Path) -> RunSetManifest:
        """
        既存のマニフェストを読み込む.

        Raises:
            ArtifactError: マニフェストが見つからない、または空の場合
        """
        with open_manifest(root) as manager, manager.get_session() as session:
            run_set = session.query(RunSetDB).first()
            if run_set is None:
                raise ArtifactError(f"マニフェストが空です: {manager.database_path}")
            return ManifestService._db_to_model(run_set)

    @staticmethod
    def update_run(
        root: str | Path,
        pair_index: int,
        mode: RunMode,
        status: RunStatus,
        schedule_hash: str | None = None,
        error: str | None = None,
    ) -> None:
        """ラン1件の状態を更新（書き込みは親プロセスだけが行う）."""
        with open_manifest(root) as manager, manager.get_session() as session:
            run = ManifestService._find_run(session, pair_index, mode)
            run.status = status.value
            run.error = error
            if schedule_hash is not None:
                run.schedule_hash = schedule_hash

    @staticmethod
    def _find_run(session: Session, pair_index: int, mode: RunMode) -> RunDB:
        run = (
            session.query(RunDB)
            .filter(RunDB.pair_index == pair_index, RunDB.mode == mode.value)
            .first()
        )
        if run is None:
            raise ArtifactError(f"マニフェストにラン (pair={pair_index}, {mode.value}) がありません")
        return run

    @staticmethod
    def _db_to_model(run_set: RunSetDB) -> RunSetManifest:
        """データベースモデルをPydanticモデルに変換."""
        runs = sorted(run_set.runs, key=lambda r: (r.pair_index, r.mode))
        return RunSetManifest(
            id=run_set.id,
            root=Path(run_set.root),
            n_pairs=run_set.n_pairs,
            base_seed=run_set.base_seed,
            config_hash=run_set.config_hash,
            runs=[
                RunRecord(
                    pair_index=run.pair_index,
                    mode=RunMode(run.mode),
                    seed=run.seed,
                    path=Path(run.path),
                    status=RunStatus(run.status),
                    schedule_hash=run.schedule_hash,
                    error=run.error,
                )
                for run in runs
            ],
        )
