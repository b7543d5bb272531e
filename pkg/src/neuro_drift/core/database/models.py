"""SQLAlchemy models for the run-set manifest."""

from datetime import datetime

from sqlalchemy import DateTime, ForeignKey, Integer, String, Text, UniqueConstraint
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column, relationship


class Base(DeclarativeBase):
    """データベースモデルのベースクラス."""
    pass


class RunSetDB(Base):
    """ランセット."""

    __tablename__ = "run_sets"

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    root: Mapped[str] = mapped_column(Text, nullable=False)
    n_pairs: Mapped[int] = mapped_column(Integer, nullable=False)
    base_seed: Mapped[int] = mapped_column(Integer, nullable=False)
    config_hash: Mapped[str] = mapped_column(String(64), nullable=False)
    created_at: Mapped[datetime] = mapped_column(
        DateTime, default=datetime.utcnow, nullable=False
    )

    # Relationships
    runs: Mapped[list["RunDB"]] = relationship(
        "RunDB",
        back_populates="run_set",
        cascade="all, delete-orphan",
        order_by="RunDB.id",
    )


class RunDB(Base):
    """ランセット内の1ラン."""

    __tablename__ = "runs"
    __table_args__ = (UniqueConstraint("run_set_id", "pair_index", "mode"),)

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    run_set_id: Mapped[int] = mapped_column(ForeignKey("run_sets.id"), nullable=False)
    pair_index: Mapped[int] = mapped_column(Integer, nullable=False)
    mode: Mapped[str] = mapped_column(String(32), nullable=False)
    seed: Mapped[int] = mapped_column(Integer, nullable=False)
    path: Mapped[str] = mapped_column(Text, nullable=False)
    status: Mapped[str] = mapped_column(String(16), default="pending", nullable=False)
    schedule_hash: Mapped[str | None] = mapped_column(String(64), nullable=True)
    error: Mapped[str | None] = mapped_column(Text, nullable=True)
    updated_at: Mapped[datetime] = mapped_column(
        DateTime, default=datetime.utcnow, onupdate=datetime.utcnow, nullable=False
    )

    # Relationships
    run_set: Mapped[RunSetDB] = relationship("RunSetDB", back_populates="runs")
