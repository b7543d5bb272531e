"""Genome decoding and genetic operators."""

import math

import numpy as np

from ..config import BrainConfig, GenomeConfig, RunConfig, WorldConfig
from ..errors import ConfigError
from ..models import GeneMap, GeneSpec, GeneValues, Genome

# 入力グループ（チャンネル順）
INPUT_GROUPS: tuple[str, ...] = ("red", "green", "blue", "energy")

# 遺伝子幅
_WIDTHS = {
    "mutation_rate": 8,
    "crossover_points": 3,
    "group_count": 3,
    "bias": 8,
    "max_weight": 8,
    "green_move_bias": 6,
    "red_turn_bias": 6,
    "eat_drive": 6,
    "mate_drive": 6,
    "excitatory": 4,
    "inhibitory": 4,
    "density": 6,
    "distortion": 4,
    "learning_rate": 6,
}


def processing_group_names(count: int) -> list[str]:
    """処理グループ名 p0..p{count-1}."""
    return [f"p{i}" for i in range(count)]


def pathway_gene(kind: str, pre: str, post: str) -> str:
    """結合遺伝子の名前（例: ``density_green_p0``）."""
    return f"{kind}_{pre}_{post}"


class GenomeService:
    """ゲノムのデコードと遺伝的操作."""

    @staticmethod
    def build_gene_map(genome: GenomeConfig, brain: BrainConfig) -> GeneMap:
        """
        標準の遺伝子配置表を作成.

        Args:
            genome: ゲノム設定
            brain: 脳設定（学習率の上限）

        Returns:
            遺伝子配置表

        Raises:
            ConfigError: 遺伝子がゲノム長に収まらない場合
        """
        entries: list[GeneSpec] = []
        offset = 0

        def add(name: str, width: int, low: float, high: float, integer: bool = False) -> None:
            nonlocal offset
            entries.append(
                GeneSpec(
                    name=name,
                    offset=offset,
                    width=width,
                    min_value=low,
                    max_value=high,
                    integer=integer,
                )
            )
            offset += width

        add("mutation_rate", _WIDTHS["mutation_rate"], genome.rate_min, genome.rate_max)
        add(
            "crossover_points",
            _WIDTHS["crossover_points"],
            genome.crossover_min,
            genome.crossover_max,
            integer=True,
        )
        add("group_count", _WIDTHS["group_count"], genome.g_min, genome.g_max, integer=True)
        add("bias", _WIDTHS["bias"], genome.bias_min, genome.bias_max)
        add("max_weight", _WIDTHS["max_weight"], genome.max_weight_min, genome.max_weight_max)
        add("green_move_bias", _WIDTHS["green_move_bias"], 0.0, 1.0)
        add("red_turn_bias", _WIDTHS["red_turn_bias"], 0.0, 1.0)
        add("eat_drive", _WIDTHS["eat_drive"], 0.0, 1.0)
        add("mate_drive", _WIDTHS["mate_drive"], 0.0, 1.0)

        groups = processing_group_names(genome.g_max)
        for group in groups:
            add(
                f"excitatory_{group}",
                _WIDTHS["excitatory"],
                genome.excitatory_min,
                genome.excitatory_max,
                integer=True,
            )
            add(
                f"inhibitory_{group}",
                _WIDTHS["inhibitory"],
                genome.inhibitory_min,
                genome.inhibitory_max,
                integer=True,
            )

        for pre in (*INPUT_GROUPS, *groups):
            for post in groups:
                add(pathway_gene("density", pre, post), _WIDTHS["density"], 0.0, 1.0)
                add(pathway_gene("distortion", pre, post), _WIDTHS["distortion"], 0.0, 1.0)
                add(
                    pathway_gene("learning_rate", pre, post),
                    _WIDTHS["learning_rate"],
                    0.0,
                    brain.eta_max,
                )

        if offset > genome.length:
            raise ConfigError(
                f"遺伝子配置 ({offset} bit) がゲノム長 {genome.length} に収まりません"
            )
        return GeneMap(genome_length=genome.length, entries=entries)

    @staticmethod
    def raw_value(genome: Genome, spec: GeneSpec) -> int:
        """遺伝子のビットを符号なし整数として読む（MSB 先頭）."""
        bits = genome.bits[spec.offset : spec.end]
        raw = 0
        for bit in bits.tolist():
            raw = (raw << 1) | bit
        return raw

    @staticmethod
    def decode_gene(genome: Genome, spec: GeneSpec) -> float | int:
        """1遺伝子をデコード."""
        raw = GenomeService.raw_value(genome, spec)
        value = spec.min_value + (raw / spec.raw_max) * (spec.max_value - spec.min_value)
        if spec.integer:
            return int(math.floor(value + 0.5))
        return value

    @staticmethod
    def decode(genome: Genome, gene_map: GeneMap) -> GeneValues:
        """
        ゲノムを物理値にデコード.

        Args:
            genome: ゲノム
            gene_map: 遺伝子配置表

        Returns:
            遺伝子名 → 値
        """
        if genome.length != gene_map.genome_length:
            raise ValueError(
                f"ゲノム長 {genome.length} が配置表の長さ {gene_map.genome_length} と一致しません"
            )
        return {spec.name: GenomeService.decode_gene(genome, spec) for spec in gene_map.entries}

    @staticmethod
    def encode_gene(bits: np.ndarray, spec: GeneSpec, value: float) -> None:
        """値に最も近い raw を書き込む（bits を直接更新）."""
        span = spec.max_value - spec.min_value
        fraction = 0.0 if span == 0 else (value - spec.min_value) / span
        raw = int(np.clip(math.floor(fraction * spec.raw_max + 0.5), 0, spec.raw_max))
        for i in range(spec.width):
            bits[spec.offset + i] = (raw >> (spec.width - 1 - i)) & 1

    @staticmethod
    def crossover(a: Genome, b: Genome, rng: np.random.Generator, gene_map: GeneMap) -> Genome:
        """
        多点交叉.

        交叉点数は一様に選んだ片親の遺伝子から読み、最初の親も一様に選ぶ。
        """
        if a.length != b.length:
            raise ValueError("交叉する親のゲノム長が一致しません")

        length = a.length
        points_parent = a if rng.random() < 0.5 else b
        k = int(GenomeService.decode_gene(points_parent, gene_map.get("crossover_points")))
        k = max(0, min(k, length - 1))

        first, second = (a, b) if rng.random() < 0.5 else (b, a)
        cuts = np.sort(rng.choice(np.arange(1, length), size=k, replace=False))
        segment = np.searchsorted(cuts, np.arange(length), side="right")
        child = np.where(segment % 2 == 0, first.bits, second.bits)
        return Genome(child)

    @staticmethod
    def mutate_counted(
        genome: Genome, rng: np.random.Generator, gene_map: GeneMap
    ) -> tuple[Genome, int]:
        """突然変異（反転ビット数も返す）. 変異率は反転前に読む."""
        rate = float(GenomeService.decode_gene(genome, gene_map.get("mutation_rate")))
        flips = rng.random(genome.length) < rate
        return Genome(genome.bits ^ flips.astype(np.uint8)), int(flips.sum())

    @staticmethod
    def mutate(genome: Genome, rng: np.random.Generator, gene_map: GeneMap) -> Genome:
        """各ビットを自身の変異率遺伝子の確率で独立に反転."""
        return GenomeService.mutate_counted(genome, rng, gene_map)[0]

    @staticmethod
    def make_seed_genome(config: RunConfig, gene_map: GeneMap | None = None) -> Genome:
        """
        種ゲノムを作成（乱数を使わない）.

        グループ数は最小、ニューロン数は最小付近、結合密度と学習率は小さい固定値。
        緑入力→move と赤入力→turn のバイアスで「餌に向かい、攻撃から離れる」傾向を与える。
        eat と mate の出力にはバイアスを足し、しきい値を常に上回るようにする。
        """
        genome_cfg = config.genome
        if gene_map is None:
            gene_map = GenomeService.build_gene_map(genome_cfg, config.brain)

        bits = np.zeros(genome_cfg.length, dtype=np.uint8)

        def put(name: str, value: float) -> None:
            GenomeService.encode_gene(bits, gene_map.get(name), value)

        put("mutation_rate", genome_cfg.seed_mutation_rate)
        put("crossover_points", genome_cfg.seed_crossover_points)
        put("group_count", genome_cfg.g_min)
        put("bias", genome_cfg.seed_bias)
        put("max_weight", genome_cfg.seed_max_weight)
        put("green_move_bias", genome_cfg.seed_green_move_bias)
        put("red_turn_bias", genome_cfg.seed_red_turn_bias)
        put("eat_drive", genome_cfg.seed_eat_drive)
        put("mate_drive", genome_cfg.seed_mate_drive)

        groups = processing_group_names(genome_cfg.g_max)
        output_group = groups[genome_cfg.g_min - 1]
        for group in groups:
            if group == output_group:
                put(f"excitatory_{group}", genome_cfg.seed_output_excitatory)
                put(f"inhibitory_{group}", genome_cfg.seed_inhibitory)
            else:
                put(f"excitatory_{group}", genome_cfg.excitatory_min)
                put(f"inhibitory_{group}", genome_cfg.inhibitory_min)

        for pre in (*INPUT_GROUPS, *groups):
            for post in groups:
                put(pathway_gene("density", pre, post), genome_cfg.seed_density)
                put(pathway_gene("distortion", pre, post), genome_cfg.seed_distortion)
                put(pathway_gene("learning_rate", pre, post), genome_cfg.seed_learning_rate)

        return Genome(bits)

    @staticmethod
    def input_group_sizes(world: WorldConfig) -> list[tuple[str, int]]:
        """入力グループとサイズ（色チャンネルはレイ数、エネルギーは1）."""
        return [
            (name, 1 if name == "energy" else world.ray_count) for name in INPUT_GROUPS
        ]
