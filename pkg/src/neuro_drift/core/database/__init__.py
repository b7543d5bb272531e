"""Database layer for the run-set manifest."""

from .init import create_tables, database_exists, open_manifest
from .models import Base, RunDB, RunSetDB
from .session import MANIFEST_FILENAME, DatabaseManager

__all__ = [
    "Base",
    "DatabaseManager",
    "MANIFEST_FILENAME",
    "RunDB",
    "RunSetDB",
    "create_tables",
    "database_exists",
    "open_manifest",
]
