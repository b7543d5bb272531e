"""Manifest schema creation and opening."""

from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

from sqlalchemy import inspect

from ..errors import ArtifactError
from .models import Base
from .session import DatabaseManager

REQUIRED_TABLES = {"run_sets", "runs"}


def create_tables(manager: DatabaseManager) -> None:
    """マニフェストのテーブルを作成."""
    if manager.engine is None:
        raise ArtifactError("マニフェスト DB が初期化されていません")

    Base.metadata.create_all(bind=manager.engine)


def database_exists(manager: DatabaseManager) -> bool:
    """DB ファイルがあり、マニフェストのテーブルが揃っているか."""
    if not manager.exists or manager.engine is None:
        return False

    tables = set(inspect(manager.engine).get_table_names())
    return REQUIRED_TABLES.issubset(tables)


@contextmanager
def open_manifest(root: str | Path, create: bool = False) -> Iterator[DatabaseManager]:
    """
    ランセットのマニフェスト DB を開き、抜けるときに閉じる.

    Args:
        root: ランセットのルートディレクトリ
        create: 無ければ作成する

    Raises:
        ArtifactError: create=False でマニフェストが無い、またはテーブルが無い場合
    """
    manager = DatabaseManager.for_root(root)
    if not create and not manager.exists:
        raise ArtifactError(f"マニフェストが見つかりません: {manager.database_path}")

    manager.initialize()
    try:
        if create:
            create_tables(manager)
        elif not database_exists(manager):
            raise ArtifactError(f"マニフェストのテーブルがありません: {manager.database_path}")
        yield manager
    finally:
        manager.close()
