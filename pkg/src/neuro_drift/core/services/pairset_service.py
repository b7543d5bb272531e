"""Paired driven/lockstep run sets."""

import logging
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path

from ..artifacts import RunDirectory, file_sha256, parse_comment_header
from ..config import RunConfig, RunMode, dump_flat_config
from ..errors import ArtifactError, NeuroDriftError
from ..models import RunSetManifest, RunStatus
from .manifest_service import ManifestService
from .run_service import RunService

logger = logging.getLogger(__name__)


@dataclass
class PairOutcome:
    """1ペア分の実行結果（ワーカーから親プロセスへ返す）."""

    pair_index: int
    driven_status: RunStatus
    lockstep_status: RunStatus
    driven_hash: str | None = None
    lockstep_hash: str | None = None
    driven_error: str | None = None
    lockstep_error: str | None = None
    skipped: bool = False


def run_pair(
    config_data: dict, pair_index: int, driven_seed: int, driven_dir: str, lockstep_dir: str
) -> PairOutcome:
    """
    1ペアを実行（driven → lockstep）.

    完了マーカーのあるランは再実行しない。プロセスプールから呼べるようモジュール関数にしている。
    どの例外もペアの失敗として返し、ランセット全体は止めない。
    """
    config = RunConfig.model_validate(config_data)
    driven = RunDirectory(driven_dir)
    lockstep = RunDirectory(lockstep_dir)
    outcome = PairOutcome(
        pair_index=pair_index,
        driven_status=RunStatus.PENDING,
        lockstep_status=RunStatus.PENDING,
        skipped=driven.is_complete() and lockstep.is_complete(),
    )

    if not driven.is_complete():
        try:
            RunService.run_driven(config, driven_seed, driven.path)
        except Exception as e:
            logger.exception("pair %d: driven ランが失敗しました", pair_index)
            outcome.driven_status = RunStatus.FAILED
            outcome.driven_error = describe_error(e)
            outcome.lockstep_status = RunStatus.FAILED
            outcome.lockstep_error = "driven ランが失敗したため実行していません"
            return outcome
    outcome.driven_status = RunStatus.COMPLETE
    outcome.driven_hash = file_sha256(driven.events)

    if not lockstep.is_complete():
        try:
            RunService.run_lockstep(config, driven_seed, driven.events, lockstep.path)
        except Exception as e:
            logger.exception("pair %d: lockstep ランが失敗しました", pair_index)
            outcome.lockstep_status = RunStatus.FAILED
            outcome.lockstep_error = describe_error(e)
            return outcome
    outcome.lockstep_status = RunStatus.COMPLETE
    outcome.lockstep_hash = consumed_schedule_hash(lockstep)
    return outcome


def describe_error(error: BaseException) -> str:
    """マニフェストに残すエラー文（パッケージ外の例外には型名を付ける）."""
    if isinstance(error, NeuroDriftError):
        return str(error)
    return f"{type(error).__name__}: {error}"


def failed_outcome(pair_index: int, error: BaseException) -> PairOutcome:
    """ワーカー自体が結果を返せなかったペア."""
    message = describe_error(error)
    return PairOutcome(
        pair_index=pair_index,
        driven_status=RunStatus.FAILED,
        lockstep_status=RunStatus.FAILED,
        driven_error=message,
        lockstep_error=message,
    )


def consumed_schedule_hash(run_dir: RunDirectory) -> str | None:
    """lockstep ランが消費したイベントログの SHA-256（ヘッダから読む）."""
    with open(run_dir.events, encoding="utf-8") as f:
        return parse_comment_header(f.readline().strip(), run_dir.events).schedule_hash


class PairsetService:
    """ランセットの実行."""

    @staticmethod
    def run_pairset(
        config: RunConfig,
        root: str | Path,
        n_pairs: int,
        base_seed: int,
        workers: int = 1,
        on_pair: Callable[[PairOutcome], None] | None = None,
    ) -> RunSetManifest:
        """
        n_pairs 組の driven/lockstep ランを実行.

        Args:
            config: ラン設定（seed と mode はペアごとに上書き）
            root: ランセットのルートディレクトリ
            n_pairs: ペア数
            base_seed: 基準 seed
            workers: 並列に実行するペア数
            on_pair: ペア完了ごとのコールバック

        Returns:
            更新後のマニフェスト
        """
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        manifest = ManifestService.create_or_resume(root, n_pairs, base_seed, config)
        (root / "config.cfg").write_text(dump_flat_config(config), encoding="utf-8")

        jobs = []
        for index in range(n_pairs):
            driven, lockstep = manifest.pair(index)
            if driven is None or lockstep is None:
                raise ArtifactError(f"マニフェストにペア {index} がありません")
            jobs.append((index, driven.seed, str(driven.path), str(lockstep.path)))
            for mode in (RunMode.DRIVEN, RunMode.LOCKSTEP):
                ManifestService.update_run(root, index, mode, RunStatus.RUNNING)

        config_data = config.model_dump(mode="json")

        def record(outcome: PairOutcome) -> None:
            ManifestService.update_run(
                root,
                outcome.pair_index,
                RunMode.DRIVEN,
                outcome.driven_status,
                schedule_hash=outcome.driven_hash,
                error=outcome.driven_error,
            )
            ManifestService.update_run(
                root,
                outcome.pair_index,
                RunMode.LOCKSTEP,
                outcome.lockstep_status,
                schedule_hash=outcome.lockstep_hash,
                error=outcome.lockstep_error,
            )
            if outcome.skipped:
                logger.info("pair %d: 完了済みのためスキップ", outcome.pair_index)
            elif outcome.driven_error or outcome.lockstep_error:
                logger.error(
                    "pair %d: 失敗: %s",
                    outcome.pair_index,
                    outcome.driven_error or outcome.lockstep_error,
                )
            if on_pair is not None:
                on_pair(outcome)

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = {pool.submit(run_pair, config_data, *job): job[0] for job in jobs}
                for future in as_completed(futures):
                    try:
                        outcome = future.result()
                    except Exception as e:
                        logger.exception("pair %d: ワーカーが異常終了しました", futures[future])
                        outcome = failed_outcome(futures[future], e)
                    record(outcome)
        else:
            for job in jobs:
                record(run_pair(config_data, *job))

        return ManifestService.load(root)
