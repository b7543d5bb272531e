"""Header lines shared by the text and binary artifacts."""

import hashlib
import json
from pathlib import Path
from typing import TypeVar

from pydantic import ValidationError

from ... import ARTIFACT_FORMAT_VERSION
from ..errors import ArtifactError, InconsistencyError
from ..models import ArtifactHeader

HeaderT = TypeVar("HeaderT", bound=ArtifactHeader)

_COMMENT_KEYS = {"format": "format_version"}


def file_sha256(path: str | Path) -> str:
    """ファイル内容の SHA-256."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def format_comment_header(header: ArtifactHeader) -> str:
    """CSV 先頭の ``# key=value ...`` 行."""
    fields = [
        f"config_hash={header.config_hash}",
        f"seed={header.seed}",
        f"mode={header.mode.value}",
        f"format={header.format_version}",
    ]
    if header.steps is not None:
        fields.append(f"steps={header.steps}")
    if header.schedule_hash is not None:
        fields.append(f"schedule_hash={header.schedule_hash}")
    return "# " + " ".join(fields)


def parse_comment_header(line: str, path: str | Path) -> ArtifactHeader:
    """``# key=value ...`` 行を読み込む.

    Raises:
        ArtifactError: ヘッダ行が無い、または不正な場合
        InconsistencyError: フォーマットのバージョンが異なる場合
    """
    if not line.startswith("#"):
        raise ArtifactError(f"ヘッダ行がありません: {path}")

    values: dict[str, str] = {}
    for token in line[1:].split():
        if "=" not in token:
            raise ArtifactError(f"ヘッダの項目が不正です: {token} ({path})")
        key, value = token.split("=", 1)
        values[_COMMENT_KEYS.get(key, key)] = value

    header = _validate(ArtifactHeader, values, path)
    check_format_version(header, path)
    return header


def format_json_header(header: ArtifactHeader) -> bytes:
    """バイナリアーティファクト先頭の JSON ヘッダ行."""
    payload = header.model_dump(mode="json")
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


def parse_json_header(line: bytes, model: type[HeaderT], path: str | Path) -> HeaderT:
    """JSON ヘッダ行を読み込む."""
    try:
        payload = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ArtifactError(f"ヘッダを解釈できません: {path}") from e

    header = _validate(model, payload, path)
    check_format_version(header, path)
    return header


def check_format_version(header: ArtifactHeader, path: str | Path) -> None:
    """このパッケージが扱うフォーマットかどうかをチェック."""
    if header.format_version != ARTIFACT_FORMAT_VERSION:
        raise InconsistencyError(
            f"フォーマットのバージョン {header.format_version} は未対応です"
            f"（対応: {ARTIFACT_FORMAT_VERSION}）: {path}"
        )


def _validate(model: type[HeaderT], values: dict, path: str | Path) -> HeaderT:
    try:
        return model.model_validate(values)
    except ValidationError as e:
        raise ArtifactError(f"ヘッダが不正です: {path}: {e}") from e
