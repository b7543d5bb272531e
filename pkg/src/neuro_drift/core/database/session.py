"""SQLite engine and sessions for the run-set manifest."""

from collections.abc import Generator
from contextlib import contextmanager
from pathlib import Path

from sqlalchemy import create_engine, event
from sqlalchemy.engine import Engine
from sqlalchemy.orm import Session, sessionmaker

from ..errors import ArtifactError

MANIFEST_FILENAME = "manifest.db"

# 中断したランセットの再開時に、残ったロックの解放を待つ秒数
BUSY_TIMEOUT_SECONDS = 30


class DatabaseManager:
    """ランセットのマニフェスト DB（書き込むのは親プロセスだけ）."""

    def __init__(self, database_path: str | Path):
        """
        初期化.

        Args:
            database_path: データベースファイルのパス
        """
        self.database_path = Path(database_path)
        self.engine: Engine | None = None
        self.SessionLocal: sessionmaker[Session] | None = None

    @classmethod
    def for_root(cls, root: str | Path) -> "DatabaseManager":
        """ランセットのルートに置くマニフェスト DB."""
        return cls(Path(root) / MANIFEST_FILENAME)

    @property
    def exists(self) -> bool:
        """DB ファイルがあるか."""
        return self.database_path.is_file()

    def initialize(self) -> None:
        """エンジンとセッションファクトリを作成（初期化済みなら何もしない）."""
        if self.engine is not None:
            return

        self.database_path.parent.mkdir(parents=True, exist_ok=True)
        self.engine = create_engine(
            f"sqlite:///{self.database_path}",
            connect_args={"timeout": BUSY_TIMEOUT_SECONDS},
        )
        event.listen(self.engine, "connect", _enable_foreign_keys)
        self.SessionLocal = sessionmaker(
            bind=self.engine, autoflush=False, expire_on_commit=False
        )

    @contextmanager
    def get_session(self) -> Generator[Session, None, None]:
        """成功時にコミット、例外時にロールバックするセッション."""
        if self.SessionLocal is None:
            raise ArtifactError(
                f"マニフェスト DB が初期化されていません: {self.database_path}"
            )

        session = self.SessionLocal()
        try:
            yield session
            session.commit()
        except Exception:
            session.rollback()
            raise
        finally:
            session.close()

    def close(self) -> None:
        """接続を閉じる（再度 initialize() で開ける）."""
        if self.engine is not None:
            self.engine.dispose()
        self.engine = None
        self.SessionLocal = None


def _enable_foreign_keys(dbapi_connection, _connection_record) -> None:
    cursor = dbapi_connection.cursor()
    cursor.execute("PRAGMA foreign_keys=ON")
    cursor.close()
