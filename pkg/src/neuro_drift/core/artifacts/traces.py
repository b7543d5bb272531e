"""Per-agent lifetime activation traces.

One JSON header line followed by ``rows × n_total`` little-endian float32
values in row-major order.
"""

from collections.abc import Iterator
from pathlib import Path

import numpy as np

from ..errors import ArtifactError
from ..models import Agent, ArtifactHeader, TraceHeader
from .headers import format_json_header, parse_json_header

_DTYPE = np.dtype("<f4")


def trace_filename(agent_id: int) -> str:
    return f"agent_{agent_id:06d}.trace"


def trace_header_for(agent: Agent, death_step: int, base: ArtifactHeader) -> TraceHeader:
    """死亡したエージェントのトレースヘッダ."""
    brain = agent.brain
    roles = "".join("I" if flag else "P" for flag in brain.is_input)
    return TraceHeader(
        **base.model_dump(),
        agent_id=agent.id,
        birth_step=agent.birth_step,
        death_step=death_step,
        n_total=brain.n_neurons,
        n_input=brain.n_input,
        roles=roles,
        rows=len(agent.trace),
    )


def write_trace(path: str | Path, header: TraceHeader, matrix: np.ndarray) -> Path:
    """トレースを書き出す."""
    path = Path(path)
    data = np.ascontiguousarray(matrix, dtype=_DTYPE)
    if data.shape != (header.rows, header.n_total):
        raise ArtifactError(
            f"トレースの形 {data.shape} がヘッダ ({header.rows}, {header.n_total}) と一致しません"
        )
    with open(path, "wb") as f:
        f.write(format_json_header(header))
        f.write(data.tobytes(order="C"))
    return path


def read_trace(path: str | Path) -> tuple[TraceHeader, np.ndarray]:
    """
    トレースを読み込む.

    Raises:
        ArtifactError: ファイルが無い、または長さがヘッダと一致しない場合
    """
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"トレースが見つかりません: {path}")

    with open(path, "rb") as f:
        header = parse_json_header(f.readline(), TraceHeader, path)
        payload = f.read()

    expected = header.rows * header.n_total * _DTYPE.itemsize
    if len(payload) != expected:
        raise ArtifactError(
            f"トレースの長さ {len(payload)} byte がヘッダから求めた {expected} byte と一致しません: {path}"
        )
    matrix = np.frombuffer(payload, dtype=_DTYPE).reshape(header.rows, header.n_total)
    return header, matrix


def iter_traces(directory: str | Path) -> Iterator[Path]:
    """ディレクトリ内のトレースファイル（agent id 順）."""
    yield from sorted(Path(directory).glob("agent_*.trace"))
