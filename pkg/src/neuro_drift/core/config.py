"""Configuration management for neuro-drift."""

import copy
import hashlib
import json
import os
from enum import Enum
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigError
from .validators import parse_flat_config, parse_override

ARTIFACT_ROOT_ENV = "NEURO_DRIFT_ARTIFACT_ROOT"


class RunMode(str, Enum):
    """シミュレーションの実行モード."""

    DRIVEN = "driven"
    LOCKSTEP = "lockstep"
    COMPLEXITY_FITNESS = "complexity-fitness"


class NeuronFilter(str, Enum):
    """複雑性計算に使うニューロンの選択."""

    ALL = "all"
    INPUT = "input"
    PROCESSING = "processing"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class GenomeConfig(_Section):
    """ゲノムと遺伝子範囲の設定."""

    length: int = Field(default=1024, ge=64, description="ゲノム長 L（ビット）")
    rate_min: float = Field(default=0.001, ge=0.0, le=1.0)
    rate_max: float = Field(default=0.05, ge=0.0, le=1.0)
    crossover_min: int = Field(default=1, ge=1)
    crossover_max: int = Field(default=8, ge=1)
    g_min: int = Field(default=1, ge=1, description="処理グループ数の下限")
    g_max: int = Field(default=5, ge=1, description="処理グループ数の上限")
    excitatory_min: int = Field(default=1, ge=0)
    excitatory_max: int = Field(default=16, ge=1)
    inhibitory_min: int = Field(default=0, ge=0)
    inhibitory_max: int = Field(default=8, ge=0)
    bias_min: float = -1.0
    bias_max: float = 1.0
    max_weight_min: float = Field(default=1.0, gt=0.0)
    max_weight_max: float = Field(default=8.0, gt=0.0)

    # 種ゲノム（一様な初期個体群）の遺伝子値
    seed_mutation_rate: float = Field(default=0.01, ge=0.0, le=1.0)
    seed_crossover_points: int = Field(default=2, ge=1)
    seed_output_excitatory: int = Field(default=5, ge=5)
    seed_inhibitory: int = Field(default=1, ge=0)
    seed_density: float = Field(default=0.1, ge=0.0, le=1.0)
    seed_distortion: float = Field(default=0.0, ge=0.0, le=1.0)
    seed_learning_rate: float = Field(default=0.02, ge=0.0)
    seed_bias: float = 0.0
    seed_max_weight: float = Field(default=4.0, gt=0.0)
    seed_green_move_bias: float = Field(default=0.5, ge=0.0, le=1.0)
    seed_red_turn_bias: float = Field(default=0.5, ge=0.0, le=1.0)
    seed_eat_drive: float = Field(default=0.5, ge=0.0, le=1.0)
    seed_mate_drive: float = Field(default=0.5, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def validate_ranges(self):
        """遺伝子範囲の整合性をチェック."""
        if self.length % 8 != 0:
            raise ValueError("genome.length は8の倍数である必要があります")
        pairs = [
            ("rate_min", "rate_max"),
            ("crossover_min", "crossover_max"),
            ("g_min", "g_max"),
            ("excitatory_min", "excitatory_max"),
            ("inhibitory_min", "inhibitory_max"),
            ("bias_min", "bias_max"),
            ("max_weight_min", "max_weight_max"),
        ]
        for low, high in pairs:
            if getattr(self, low) > getattr(self, high):
                raise ValueError(f"genome.{low} は genome.{high} 以下である必要があります")
        return self


class BrainConfig(_Section):
    """ニューラルネットワークの設定."""

    eta_max: float = Field(default=0.2, ge=0.0, description="学習率 η の上限")
    initial_weight_fraction: float = Field(default=0.1, ge=0.0, le=1.0)


class WorldConfig(_Section):
    """2D 生態系の設定."""

    width: float = Field(default=100.0, gt=0.0)
    height: float = Field(default=100.0, gt=0.0)
    initial_population: int = Field(default=30, ge=0)
    p_min: int = Field(default=30, ge=0)
    p_max: int = Field(default=120, ge=1)
    m_low: float = Field(default=1.0, ge=0.0)
    m_high: float = Field(default=3.0, ge=0.0)
    e_max: float = Field(default=100.0, gt=0.0)
    max_age: int = Field(default=1000, ge=1)
    fecundity_age: int = Field(default=25, ge=0)
    eat_threshold: float = Field(default=0.6, ge=0.0)
    mate_threshold: float = Field(default=0.6, ge=0.0)
    attack_threshold: float = Field(default=0.6, ge=0.0)
    parent_min_fraction: float = Field(default=0.3, ge=0.0, le=1.0)
    birth_donation: float = Field(default=0.25, ge=0.0, le=0.5)
    v_max: float = Field(default=1.0, ge=0.0)
    theta_max: float = Field(default=0.5, ge=0.0, description="最大旋回角（rad）")
    reach: float = Field(default=2.0, gt=0.0)
    agent_radius: float = Field(default=1.0, gt=0.0)
    food_radius: float = Field(default=0.5, gt=0.0)
    vision_range: float = Field(default=30.0, gt=0.0)
    fov_degrees: float = Field(default=120.0, gt=0.0, le=360.0)
    ray_count: int = Field(default=8, ge=1)
    bite: float = Field(default=5.0, ge=0.0)
    attack_damage: float = Field(default=10.0, ge=0.0)
    corpse_fraction: float = Field(default=0.75, ge=0.0, le=1.0)
    food_item_energy: float = Field(default=25.0, gt=0.0)
    initial_food: int = Field(default=80, ge=0)
    food_cap: float = Field(default=3000.0, gt=0.0)
    food_growth: float = Field(default=20.0, ge=0.0)
    cost_fixed: float = Field(default=0.05, ge=0.0)
    cost_neuron: float = Field(default=0.002, ge=0.0)
    cost_synapse: float = Field(default=0.0002, ge=0.0)
    cost_move: float = Field(default=0.1, ge=0.0)
    cost_turn: float = Field(default=0.02, ge=0.0)
    cost_eat: float = Field(default=0.02, ge=0.0)
    cost_mate: float = Field(default=0.02, ge=0.0)
    cost_attack: float = Field(default=0.05, ge=0.0)

    @model_validator(mode="after")
    def validate_population_bounds(self):
        """個体数の上下限をチェック."""
        if self.p_min >= self.p_max:
            raise ValueError("world.p_min は world.p_max より小さい必要があります")
        if self.m_low > self.m_high:
            raise ValueError("world.m_low は world.m_high 以下である必要があります")
        return self

    @property
    def parent_min_energy(self) -> float:
        """繁殖に必要な最小エネルギー."""
        return self.parent_min_fraction * self.e_max

    @property
    def mate_distance(self) -> float:
        """交配できる距離（2体の reach 円が重なる距離）."""
        return 2.0 * self.reach


class LockstepConfig(_Section):
    """ロックステップ（受動モデル）の設定."""

    energy_floor_fraction: float = Field(default=0.01, gt=0.0, le=1.0)
    seed_offset: int = Field(default=1_000_000, ge=1)


class ComplexityConfig(_Section):
    """複雑性計算の設定."""

    jitter_sigma: float = Field(default=1e-6, ge=0.0)
    exact_limit: int = Field(default=12, ge=1, le=20)
    min_samples: int = Field(default=20, ge=2)
    negative_tolerance: float = Field(default=1e-6, ge=0.0)
    neurons: NeuronFilter = NeuronFilter.PROCESSING


class AnalysisConfig(_Section):
    """解析の設定."""

    bin_width: int = Field(default=1000, ge=1)
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    tails: Literal["one", "two"] = "one"
    histogram_bins: int = Field(default=40, ge=1)


class FitnessConfig(_Section):
    """複雑性を適応度とするモードの設定."""

    interval: int = Field(default=100, ge=1, description="置換の間隔 F")
    window: int = Field(default=200, ge=2, description="複雑性を測る直近ステップ数 W")
    min_population: int = Field(default=3, ge=3)


class RunConfig(_Section):
    """1回のランの設定."""

    steps: int = Field(default=30000, ge=1)
    seed: int = Field(default=0, ge=0)
    mode: RunMode = RunMode.DRIVEN
    snapshot_interval: int = Field(default=1000, ge=1)
    artifact_dir: str | None = Field(default=None, description="アーティファクトの出力先")
    genome: GenomeConfig = Field(default_factory=GenomeConfig)
    brain: BrainConfig = Field(default_factory=BrainConfig)
    world: WorldConfig = Field(default_factory=WorldConfig)
    lockstep: LockstepConfig = Field(default_factory=LockstepConfig)
    complexity: ComplexityConfig = Field(default_factory=ComplexityConfig)
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)
    fitness: FitnessConfig = Field(default_factory=FitnessConfig)


# ハッシュから除外する（実行ごとに変わる）キー
_HASH_EXCLUDE = {"seed", "mode", "artifact_dir"}


def config_hash(config: RunConfig) -> str:
    """シミュレーション条件のハッシュ（seed/mode/出力先を除く）."""
    payload = config.model_dump(mode="json", exclude=_HASH_EXCLUDE)
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def dump_flat_config(config: RunConfig) -> str:
    """設定をフラットな ``key = value`` 形式に変換."""
    lines: list[str] = []
    for key, value in config.model_dump(mode="json").items():
        if isinstance(value, dict):
            lines.append("")
            lines.append(f"# {key}")
            for name, item in value.items():
                lines.append(f"{key}.{name} = {_format_value(item)}")
        elif value is not None:
            lines.append(f"{key} = {_format_value(value)}")
    return "\n".join(lines).strip() + "\n"


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ConfigManager:
    """設定管理クラス."""

    def __init__(self, config_path: str | Path | None = None):
        """
        初期化.

        Args:
            config_path: 設定ファイルのパス。Noneの場合はデフォルト設定を使用。
        """
        self.config_path = Path(config_path) if config_path is not None else None
        self._data: dict[str, Any] | None = None
        self._config: RunConfig | None = None

    def load(self) -> RunConfig:
        """設定を読み込み."""
        if self._config is None:
            self._config = self._build(self._raw())
        return self._config

    def _raw(self) -> dict[str, Any]:
        if self._data is None:
            self._data = self._load_from_file()
        return self._data

    def _load_from_file(self) -> dict[str, Any]:
        """ファイルから設定を読み込み."""
        if self.config_path is None:
            return {}
        if not self.config_path.exists():
            raise ConfigError(f"設定ファイルが見つかりません: {self.config_path}")

        try:
            text = self.config_path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"設定ファイルの読み込みに失敗しました: {e}") from e
        return parse_flat_config(text)

    @staticmethod
    def _build(data: dict[str, Any]) -> RunConfig:
        try:
            return RunConfig(**data)
        except ValidationError as e:
            errors = "; ".join(
                f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
                for err in e.errors()
            )
            raise ConfigError(f"設定が不正です: {errors}") from e

    def get(self, key: str, default: Any = None) -> Any:
        """設定値を取得."""
        value: Any = self.load()
        for k in key.split("."):
            if hasattr(value, k):
                value = getattr(value, k)
            else:
                return default
        return value

    def set(self, key: str, value: Any) -> None:
        """設定値を上書き（検証付き、ファイルには書き込まない）."""
        if self.get(key, _MISSING) is _MISSING:
            raise ConfigError(f"設定キー '{key}' が見つかりません")

        data = copy.deepcopy(self._raw())
        if "." in key:
            section, name = key.split(".", 1)
            data.setdefault(section, {})[name] = value
        else:
            data[key] = value

        config = self._build(data)
        self._data = data
        self._config = config

    def apply_overrides(self, assignments: list[str]) -> RunConfig:
        """``key=value`` 形式の上書きをまとめて適用."""
        for assignment in assignments:
            key, value = parse_override(assignment)
            self.set(key, value)
        return self.load()

    def get_artifact_root(self) -> Path:
        """アーティファクトのルートディレクトリを取得（環境変数優先）."""
        env_root = os.environ.get(ARTIFACT_ROOT_ENV)
        if env_root:
            return Path(os.path.expandvars(os.path.expanduser(env_root)))

        config = self.load()
        if config.artifact_dir:
            return Path(os.path.expanduser(config.artifact_dir))
        return Path("artifacts")


_MISSING = object()
