"""Gene-map text table: ``name,offset,width,min,max,integer``."""

from pathlib import Path

import pandas as pd

from ..errors import ArtifactError
from ..models import GeneMap, GeneSpec


def write_gene_map(path: str | Path, gene_map: GeneMap) -> Path:
    """遺伝子配置表を書き出す."""
    path = Path(path)
    frame = pd.DataFrame(
        [
            {
                "name": spec.name,
                "offset": spec.offset,
                "width": spec.width,
                "min": spec.min_value,
                "max": spec.max_value,
                "integer": int(spec.integer),
            }
            for spec in gene_map.entries
        ],
        columns=["name", "offset", "width", "min", "max", "integer"],
    )
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# genome_length={gene_map.genome_length}\n")
        frame.to_csv(f, index=False, lineterminator="\n")
    return path


def read_gene_map(path: str | Path) -> GeneMap:
    """遺伝子配置表を読み込む."""
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"遺伝子配置表が見つかりません: {path}")

    with open(path, encoding="utf-8") as f:
        first = f.readline().strip()
        if not first.startswith("# genome_length="):
            raise ArtifactError(f"遺伝子配置表のヘッダが不正です: {path}")
        length = int(first.split("=", 1)[1])
        frame = pd.read_csv(f)

    entries = [
        GeneSpec(
            name=str(row.name),
            offset=int(row.offset),
            width=int(row.width),
            min_value=float(row.min),
            max_value=float(row.max),
            integer=bool(row.integer),
        )
        for row in frame.itertuples(index=False)
    ]
    return GeneMap(genome_length=length, entries=entries)
