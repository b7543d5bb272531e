"""Whole-population genome snapshots.

A JSON header line, then one block per snapshot: u32 step, u32 population,
and the genomes in id order as bit dumps (8 sites per byte, lowest site in
the most significant bit).
"""

from pathlib import Path
from types import TracebackType

import numpy as np

from ..errors import ArtifactError
from ..models import Genome, SnapshotHeader
from .headers import format_json_header, parse_json_header

_COUNTS = np.dtype("<u4")


class SnapshotWriter:
    """スナップショットを追記するライター."""

    def __init__(self, path: str | Path, header: SnapshotHeader):
        self.path = Path(path)
        self.header = header
        self._file = open(self.path, "wb")
        self._file.write(format_json_header(header))
        self.written = 0

    def write(self, step: int, genomes: list[Genome]) -> None:
        """1回分のスナップショットを書く."""
        for genome in genomes:
            if genome.length != self.header.genome_length:
                raise ArtifactError(
                    f"ゲノム長 {genome.length} がヘッダの {self.header.genome_length} と異なります"
                )
        self._file.write(np.array([step, len(genomes)], dtype=_COUNTS).tobytes())
        for genome in genomes:
            self._file.write(genome.to_bytes())
        self._file.flush()
        self.written += 1

    def close(self) -> None:
        if not self._file.closed:
            self._file.close()

    def __enter__(self) -> "SnapshotWriter":
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        self.close()


def read_snapshots(path: str | Path) -> tuple[SnapshotHeader, list[tuple[int, np.ndarray]]]:
    """
    スナップショットを読み込む.

    Returns:
        (ヘッダ, [(step, population × L のビット行列), ...])
    """
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"スナップショットが見つかりません: {path}")

    with open(path, "rb") as f:
        header = parse_json_header(f.readline(), SnapshotHeader, path)
        payload = f.read()

    length = header.genome_length
    row_bytes = (length + 7) // 8
    blocks: list[tuple[int, np.ndarray]] = []
    offset = 0
    while offset < len(payload):
        if offset + 8 > len(payload):
            raise ArtifactError(f"スナップショットが途中で切れています: {path}")
        step, population = np.frombuffer(payload, dtype=_COUNTS, count=2, offset=offset)
        offset += 8
        size = int(population) * row_bytes
        if offset + size > len(payload):
            raise ArtifactError(f"スナップショットが途中で切れています: {path}")
        packed = np.frombuffer(payload, dtype=np.uint8, count=size, offset=offset)
        bits = np.unpackbits(packed.reshape(int(population), row_bytes), axis=1, bitorder="big")
        blocks.append((int(step), bits[:, :length]))
        offset += size
    return header, blocks
