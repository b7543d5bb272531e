"""Per-step population series: ``step,population,births,deaths``."""

from pathlib import Path

import pandas as pd

from ..errors import ArtifactError
from ..models import ArtifactHeader
from .headers import format_comment_header, parse_comment_header

POPULATION_COLUMNS = ["step", "population", "births", "deaths"]


def write_population(
    path: str | Path, header: ArtifactHeader, rows: list[tuple[int, int, int, int]]
) -> Path:
    """個体数の系列を書き出す."""
    path = Path(path)
    frame = pd.DataFrame(rows, columns=POPULATION_COLUMNS)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(format_comment_header(header) + "\n")
        frame.to_csv(f, index=False, lineterminator="\n")
    return path


def read_population(path: str | Path) -> tuple[ArtifactHeader, pd.DataFrame]:
    """個体数の系列を読み込む."""
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"個体数ファイルが見つかりません: {path}")

    with open(path, encoding="utf-8") as f:
        header = parse_comment_header(f.readline().strip(), path)
        frame = pd.read_csv(f, dtype="int64")
    if list(frame.columns) != POPULATION_COLUMNS:
        raise ArtifactError(f"個体数ファイルの列が不正です: {path}")
    return header, frame
