"""Brain construction, activation stepping and Hebbian learning."""

import numpy as np
from scipy.special import expit

from ..errors import StillbornError
from ..models import (
    BEHAVIORS,
    Brain,
    GeneValues,
    InputGroup,
    NeuralArchitecture,
    Pathway,
    ProcessingGroup,
)
from .genome_service import INPUT_GROUPS, pathway_gene, processing_group_names

# 活性を (0, 1) の内側に保つための余白
ACTIVATION_EPS = 1e-12


class BrainService:
    """ニューラルネットワークの構築と更新."""

    @staticmethod
    def architecture_from_genes(
        values: GeneValues, input_groups: list[tuple[str, int]]
    ) -> NeuralArchitecture:
        """
        デコード済み遺伝子値からネットワーク構造を作成.

        最後の処理グループを出力グループとし、行動数ぶんの興奮性ニューロンを確保する。
        """
        count = int(values["group_count"])
        names = processing_group_names(count)

        groups = [
            ProcessingGroup(
                excitatory=int(values[f"excitatory_{name}"]),
                inhibitory=int(values[f"inhibitory_{name}"]),
            )
            for name in names
        ]
        last = groups[-1]
        if last.excitatory < len(BEHAVIORS):
            groups[-1] = ProcessingGroup(excitatory=len(BEHAVIORS), inhibitory=last.inhibitory)

        pre_names = [name for name, _ in input_groups] + names
        pathways = [
            Pathway(
                pre=pre,
                post=post,
                density=float(values[pathway_gene("density", pre, post)]),
                distortion=float(values[pathway_gene("distortion", pre, post)]),
                learning_rate=float(values[pathway_gene("learning_rate", pre, post)]),
            )
            for pre in pre_names
            for post in names
        ]

        return NeuralArchitecture(
            input_groups=[InputGroup(name=name, size=size) for name, size in input_groups],
            processing_groups=groups,
            pathways=pathways,
            bias=float(values["bias"]),
            max_weight=float(values["max_weight"]),
            green_move_bias=float(values["green_move_bias"]),
            red_turn_bias=float(values["red_turn_bias"]),
            eat_drive=float(values["eat_drive"]),
            mate_drive=float(values["mate_drive"]),
        )

    @staticmethod
    def build_brain(
        arch: NeuralArchitecture,
        rng: np.random.Generator,
        initial_weight_fraction: float = 0.1,
    ) -> Brain:
        """
        構造から脳を構築.

        Args:
            arch: ネットワーク構造
            rng: 乱数ストリーム
            initial_weight_fraction: 初期重みの上限（w_max 比）

        Returns:
            構築された脳

        Raises:
            StillbornError: 処理ニューロンが無い、または出力ニューロンが足りない場合
        """
        if arch.processing_count == 0:
            raise StillbornError("処理ニューロンが0個の構造です")
        if arch.processing_groups[-1].excitatory < len(BEHAVIORS):
            raise StillbornError(
                f"出力グループの興奮性ニューロンが {len(BEHAVIORS)} 個未満です"
            )

        n_input = arch.input_count
        n = n_input + arch.processing_count

        slices: dict[str, slice] = {}
        excitatory = np.ones(n, dtype=bool)
        start = 0
        for group in arch.input_groups:
            slices[group.name] = slice(start, start + group.size)
            start += group.size
        for name, group in zip(arch.processing_names, arch.processing_groups, strict=True):
            slices[name] = slice(start, start + group.size)
            excitatory[start + group.excitatory : start + group.size] = False
            start += group.size

        output_start = slices[arch.processing_names[-1]].start
        output_indices = np.arange(output_start, output_start + len(BEHAVIORS))

        weights = np.zeros((n, n))
        mask = np.zeros((n, n), dtype=bool)
        eta = np.zeros((n, n))
        w_max = arch.max_weight
        sign = np.where(excitatory, 1.0, -1.0)

        for pathway in arch.pathways:
            pre_slice, post_slice = slices[pathway.pre], slices[pathway.post]
            pre_idx = np.arange(pre_slice.start, pre_slice.stop)
            post_idx = np.arange(post_slice.start, post_slice.stop)
            if pre_idx.size == 0 or post_idx.size == 0:
                continue

            chosen = _choose_connections(
                pre_idx.size, post_idx.size, pathway.density, pathway.distortion, rng
            )
            for j_local, i_local in chosen:
                i, j = pre_idx[i_local], post_idx[j_local]
                mask[j, i] = True
                eta[j, i] = pathway.learning_rate
                magnitude = rng.uniform(0.0, initial_weight_fraction * w_max)
                weights[j, i] = sign[i] * magnitude

        # 種の行動傾向: 緑→move, 赤→turn
        _set_pathway_bias(
            weights, mask, eta, arch, slices, "green", output_indices[0], arch.green_move_bias
        )
        _set_pathway_bias(
            weights, mask, eta, arch, slices, "red", output_indices[1], arch.red_turn_bias
        )

        bias = np.zeros(n)
        bias[n_input:] = arch.bias
        bias[output_indices[BEHAVIORS.index("eat")]] += arch.eat_drive * w_max
        bias[output_indices[BEHAVIORS.index("mate")]] += arch.mate_drive * w_max

        activations = np.full(n, 0.5)
        activations[:n_input] = 0.0

        return Brain(
            n_input=n_input,
            excitatory=excitatory,
            output_indices=output_indices,
            weights=weights,
            mask=mask,
            eta=eta,
            bias=bias,
            max_weight=w_max,
            activations=activations,
            group_slices=slices,
        )

    @staticmethod
    def brain_step(brain: Brain, inputs: np.ndarray) -> np.ndarray:
        """
        1ステップ分の活性を同期更新.

        入力ニューロンを先に書き換え、処理ニューロンは前ステップの処理活性と
        今回の入力から a' = σ(Σ w·a + bias) を一斉に計算する。
        """
        inputs = np.asarray(inputs, dtype=np.float64)
        if inputs.shape != (brain.n_input,):
            raise ValueError(
                f"入力の長さ {inputs.shape} が入力ニューロン数 {brain.n_input} と一致しません"
            )

        state = brain.activations.copy()
        state[: brain.n_input] = inputs
        proc = slice(brain.n_input, brain.n_neurons)
        drive = brain.weights[proc] @ state + brain.bias[proc]
        state[proc] = np.clip(expit(drive), ACTIVATION_EPS, 1.0 - ACTIVATION_EPS)
        brain.activations = state
        return state

    @staticmethod
    def hebbian_update(brain: Brain) -> np.ndarray:
        """
        ヘブ則で重みを更新.

        Δw = η·(a_pre − 0.5)·(a_post − 0.5)、その後 pre の符号に応じて
        [0, w_max] または [−w_max, 0] にクランプする。
        """
        centered = brain.activations - 0.5
        delta = brain.eta * np.outer(centered, centered)
        weights = brain.weights + np.where(brain.mask, delta, 0.0)

        low = np.where(brain.excitatory, 0.0, -brain.max_weight)
        high = np.where(brain.excitatory, brain.max_weight, 0.0)
        brain.weights = np.clip(weights, low[None, :], high[None, :])
        return brain.weights


def _choose_connections(
    n_pre: int,
    n_post: int,
    density: float,
    distortion: float,
    rng: np.random.Generator,
) -> list[tuple[int, int]]:
    """
    グループ間の結合を選ぶ.

    post ごとに結合数を Binomial(n_pre, density) で決め、各結合は確率 1−distortion で
    位置の揃った（トポグラフィックな）候補、それ以外は残りから一様に選ぶ。
    """
    chosen: list[tuple[int, int]] = []
    if density <= 0.0:
        return chosen

    pre_centers = np.arange(n_pre) + 0.5
    for j in range(n_post):
        m = int(rng.binomial(n_pre, density))
        if m == 0:
            continue
        if m == n_pre:
            chosen.extend((j, i) for i in range(n_pre))
            continue

        center = (j + 0.5) * n_pre / n_post
        preference = list(np.argsort(np.abs(pre_centers - center), kind="stable"))
        for _ in range(m):
            if rng.random() < 1.0 - distortion:
                pick = preference.pop(0)
            else:
                pick = preference.pop(int(rng.integers(len(preference))))
            chosen.append((j, int(pick)))
    return chosen


def _set_pathway_bias(
    weights: np.ndarray,
    mask: np.ndarray,
    eta: np.ndarray,
    arch: NeuralArchitecture,
    slices: dict[str, slice],
    source: str,
    target: int,
    fraction: float,
) -> None:
    """入力グループ source から出力ニューロン target への結合を固定重みで張る."""
    if fraction <= 0.0 or source not in slices:
        return

    output_group = arch.processing_names[-1]
    learning_rate = next(
        (p.learning_rate for p in arch.pathways if p.pre == source and p.post == output_group),
        0.0,
    )
    pre = np.arange(slices[source].start, slices[source].stop)
    weights[target, pre] = fraction * arch.max_weight
    mask[target, pre] = True
    eta[target, pre] = learning_rate


__all__ = ["ACTIVATION_EPS", "BrainService", "INPUT_GROUPS"]
