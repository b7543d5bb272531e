"""Validators for the flat ``key = value`` configuration format."""

import re
from typing import Any

import yaml

from .errors import ConfigError

_KEY_PATTERN = re.compile(r"^[a-z_][a-z0-9_]*(\.[a-z_][a-z0-9_]*)?$")


class ConfigLineValidator:
    """設定ファイル1行分のバリデーター."""

    @staticmethod
    def validate_key(key: str, line_no: int) -> str:
        """キー名を検証（``section.name`` または ``name``）."""
        if not _KEY_PATTERN.match(key):
            raise ConfigError(f"{line_no}行目: 不正なキー名です: '{key}'")
        return key

    @staticmethod
    def validate_value(raw: str, key: str, line_no: int) -> Any:
        """値を YAML スカラーとして解釈."""
        if not raw:
            raise ConfigError(f"{line_no}行目: '{key}' の値が空です")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as e:
            raise ConfigError(f"{line_no}行目: '{key}' の値を解釈できません: {raw}") from e

        if isinstance(value, dict | list):
            raise ConfigError(f"{line_no}行目: '{key}' にはスカラー値のみ指定できます")
        return value

    @classmethod
    def parse_line(cls, line: str, line_no: int) -> tuple[str, Any] | None:
        """1行を (key, value) に分解. コメント・空行は None."""
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            return None

        if "=" not in stripped:
            raise ConfigError(f"{line_no}行目: 'key = value' 形式ではありません: {line.strip()}")

        key, raw = (part.strip() for part in stripped.split("=", 1))
        return cls.validate_key(key, line_no), cls.validate_value(raw, key, line_no)


def parse_flat_config(text: str) -> dict[str, Any]:
    """フラットな設定テキストをネストした辞書に変換.

    Raises:
        ConfigError: 構文エラーまたはキーの重複
    """
    data: dict[str, Any] = {}
    seen: set[str] = set()

    for line_no, line in enumerate(text.splitlines(), start=1):
        parsed = ConfigLineValidator.parse_line(line, line_no)
        if parsed is None:
            continue

        key, value = parsed
        if key in seen:
            raise ConfigError(f"{line_no}行目: キー '{key}' が重複しています")
        seen.add(key)

        if "." in key:
            section, name = key.split(".", 1)
            target = data.setdefault(section, {})
            if not isinstance(target, dict):
                raise ConfigError(f"{line_no}行目: '{section}' はセクションではありません")
            target[name] = value
        else:
            if isinstance(data.get(key), dict):
                raise ConfigError(f"{line_no}行目: '{key}' はセクション名です")
            data[key] = value

    return data


def parse_override(assignment: str) -> tuple[str, Any]:
    """``--set key=value`` 形式の上書き指定を解釈."""
    parsed = ConfigLineValidator.parse_line(assignment, 1)
    if parsed is None:
        raise ConfigError(f"上書き指定が空です: '{assignment}'")
    return parsed
