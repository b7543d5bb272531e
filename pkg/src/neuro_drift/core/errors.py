"""Exception hierarchy and process exit codes."""

from enum import IntEnum


class ExitCode(IntEnum):
    """CLIの終了コード."""

    SUCCESS = 0
    USAGE = 1
    RUNTIME = 2
    INCONSISTENCY = 3


class NeuroDriftError(Exception):
    """neuro-drift の基底例外."""

    exit_code: ExitCode = ExitCode.RUNTIME


class ConfigError(NeuroDriftError, ValueError):
    """設定ファイルまたはコマンド引数の誤り."""

    exit_code = ExitCode.USAGE


class ArtifactError(NeuroDriftError, RuntimeError):
    """アーティファクトの読み書きに失敗した."""


class StillbornError(NeuroDriftError, ValueError):
    """ゲノムから有効な脳を構築できない（死産扱い）."""


class DegenerateCovarianceError(NeuroDriftError, ValueError):
    """共分散行列が正定値でない."""


class InconsistencyError(NeuroDriftError, RuntimeError):
    """スケジュールの枯渇・不一致、フォーマット混在など整合性の破綻."""

    exit_code = ExitCode.INCONSISTENCY


class NothingToAnalyzeError(NeuroDriftError, RuntimeError):
    """解析対象の完了ペアが存在しない."""
