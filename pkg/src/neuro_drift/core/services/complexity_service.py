"""Gaussian entropy, integration and neural complexity of activation traces."""

import logging
import math
from itertools import combinations

import numpy as np

from ..config import ComplexityConfig, NeuronFilter
from ..errors import DegenerateCovarianceError
from ..models import ActivationTrace, ComplexityReport, CovarianceModel

logger = logging.getLogger(__name__)

_LN2 = math.log(2.0)

INSUFFICIENT_SAMPLES = "insufficient samples"
DEGENERATE_COVARIANCE = "degenerate covariance"
NON_FINITE = "non-finite value"
NEGATIVE_COMPLEXITY = "negative complexity"


class ComplexityService:
    """活性トレースの情報量計算（単位: bit）."""

    @staticmethod
    def select_columns(is_input: np.ndarray, neuron_filter: NeuronFilter) -> np.ndarray:
        """役割でニューロン列を選ぶ."""
        is_input = np.asarray(is_input, dtype=bool)
        if neuron_filter == NeuronFilter.INPUT:
            return np.flatnonzero(is_input)
        if neuron_filter == NeuronFilter.PROCESSING:
            return np.flatnonzero(~is_input)
        return np.arange(is_input.size)

    @staticmethod
    def min_samples(n: int, config: ComplexityConfig) -> int:
        """有効なトレースに必要なサンプル数 max(2n, 下限)."""
        return max(2 * n, config.min_samples)

    @staticmethod
    def build_trace(
        recording: np.ndarray,
        is_input: np.ndarray,
        neuron_filter: NeuronFilter,
        config: ComplexityConfig,
        rng: np.random.Generator,
        agent_id: int = 0,
        birth_step: int = 0,
        death_step: int = 0,
    ) -> ActivationTrace:
        """
        生涯記録から列を選び、微小なガウスノイズを加えたトレースを作成.

        Args:
            recording: T × n_total の活性記録
            is_input: 列ごとの入力ニューロンフラグ
            neuron_filter: all / input / processing
            config: 複雑性設定（ノイズの σ、サンプル数の下限）
            rng: ノイズ用の乱数ストリーム

        Returns:
            トレース（サンプル不足なら valid=False）
        """
        recording = np.asarray(recording, dtype=np.float64)
        is_input = np.asarray(is_input, dtype=bool)
        if recording.ndim != 2 or recording.shape[1] != is_input.size:
            raise ValueError(
                f"記録の形 {recording.shape} が役割の数 {is_input.size} と一致しません"
            )

        columns = ComplexityService.select_columns(is_input, neuron_filter)
        matrix = recording[:, columns]
        if config.jitter_sigma > 0.0:
            matrix = matrix + rng.normal(0.0, config.jitter_sigma, size=matrix.shape)

        n = columns.size
        samples = matrix.shape[0]
        valid = n > 0 and samples >= ComplexityService.min_samples(n, config)
        return ActivationTrace(
            agent_id=agent_id,
            birth_step=birth_step,
            death_step=death_step,
            neuron_filter=neuron_filter,
            is_input=is_input[columns],
            matrix=matrix,
            valid=valid,
            reason=None if valid else INSUFFICIENT_SAMPLES,
        )

    @staticmethod
    def gaussian_entropy(model: CovarianceModel, subset: tuple[int, ...] | None = None) -> float:
        """
        ガウス近似のエントロピー H = ½·log₂((2πe)^k · det Σ).

        Raises:
            DegenerateCovarianceError: 部分共分散が正定値でない場合
        """
        if subset is None:
            subset = tuple(range(model.n))
        k = len(subset)
        if k == 0:
            return 0.0

        index = np.asarray(subset)
        covariance = model.covariance[np.ix_(index, index)]
        try:
            chol = np.linalg.cholesky(covariance)
        except np.linalg.LinAlgError as e:
            raise DegenerateCovarianceError(
                f"共分散が正定値ではありません（部分集合 {k} 変数）"
            ) from e

        nats = np.sum(np.log(np.diagonal(chol))) + 0.5 * k * (math.log(2.0 * math.pi) + 1.0)
        bits = float(nats / _LN2)
        if not math.isfinite(bits):
            raise DegenerateCovarianceError("エントロピーが有限ではありません")
        return bits

    @staticmethod
    def integration(model: CovarianceModel) -> float:
        """統合度 I(X) = Σ H(xᵢ) − H(X)."""
        marginals = sum(ComplexityService.gaussian_entropy(model, (i,)) for i in range(model.n))
        return marginals - ComplexityService.gaussian_entropy(model)

    @staticmethod
    def complexity_exact(model: CovarianceModel, exact_limit: int = 12) -> float | None:
        """
        全部分集合を列挙した複雑性 Σₖ [⟨H(Xₖ)⟩ − (k/n)·H(X)].

        Returns:
            複雑性。n が exact_limit を超える場合は None
        """
        n = model.n
        if n > exact_limit:
            return None

        total = ComplexityService.gaussian_entropy(model)
        value = 0.0
        for k in range(1, n + 1):
            entropies = [
                ComplexityService.gaussian_entropy(model, subset)
                for subset in combinations(range(n), k)
            ]
            value += float(np.mean(entropies)) - (k / n) * total
        return value

    @staticmethod
    def leave_one_out_entropies(model: CovarianceModel) -> np.ndarray:
        """各 i について H(X − xᵢ)."""
        everything = range(model.n)
        return np.array(
            [
                ComplexityService.gaussian_entropy(
                    model, tuple(j for j in everything if j != i)
                )
                for i in everything
            ]
        )

    @staticmethod
    def conditional_entropies(model: CovarianceModel) -> np.ndarray:
        """各 i について H(xᵢ | X − xᵢ) = H(X) − H(X − xᵢ)."""
        total = ComplexityService.gaussian_entropy(model)
        return total - ComplexityService.leave_one_out_entropies(model)

    @staticmethod
    def complexity_approx(model: CovarianceModel) -> float:
        """
        一つ抜きの近似 C = Σ H(X − xᵢ) − (n − 1)·H(X).

        C = H(X) − Σ H(xᵢ | X − xᵢ) と同じ値になる。
        """
        n = model.n
        if n == 0:
            raise ValueError("列が0個のモデルです")
        total = ComplexityService.gaussian_entropy(model)
        leave_one_out = ComplexityService.leave_one_out_entropies(model)
        return float(leave_one_out.sum() - (n - 1) * total)

    @staticmethod
    def compute_report(trace: ActivationTrace, config: ComplexityConfig) -> ComplexityReport:
        """
        トレース1本の複雑性レポート.

        共分散が退化している場合も例外にはせず、無効なレポートを返す。
        """
        if not trace.valid:
            return ComplexityReport.invalid(trace, trace.reason or INSUFFICIENT_SAMPLES)

        model = CovarianceModel.from_matrix(trace.matrix)
        try:
            entropy = ComplexityService.gaussian_entropy(model)
            integration = ComplexityService.integration(model)
            c_approx = ComplexityService.complexity_approx(model)
            c_exact = ComplexityService.complexity_exact(model, config.exact_limit)
        except DegenerateCovarianceError as e:
            logger.debug("agent %d: %s", trace.agent_id, e)
            return ComplexityReport.invalid(trace, DEGENERATE_COVARIANCE)

        values = [entropy, integration, c_approx] + ([c_exact] if c_exact is not None else [])
        if not all(math.isfinite(v) for v in values):
            return ComplexityReport.invalid(trace, NON_FINITE)

        reason = None
        if c_approx < -config.negative_tolerance:
            logger.warning(
                "agent %d: 複雑性が負になりました (%.3g bit)", trace.agent_id, c_approx
            )
            reason = NEGATIVE_COMPLEXITY

        return ComplexityReport(
            agent_id=trace.agent_id,
            death_step=trace.death_step,
            neuron_filter=trace.neuron_filter,
            n=trace.n,
            samples=trace.samples,
            c_approx=c_approx,
            c_exact=c_exact,
            integration=integration,
            entropy=entropy,
            valid=True,
            reason=reason,
        )

    @staticmethod
    def jitter_rng(seed: int, agent_id: int) -> np.random.Generator:
        """エージェントごとのノイズ用乱数（ラン seed と id から決定）."""
        return np.random.default_rng([seed, agent_id])

    @staticmethod
    def window_complexity(
        recording: np.ndarray,
        is_input: np.ndarray,
        config: ComplexityConfig,
        rng: np.random.Generator,
        neuron_filter: NeuronFilter | None = None,
    ) -> float | None:
        """直近の記録の複雑性（無効なら None）."""
        trace = ComplexityService.build_trace(
            recording, is_input, neuron_filter or config.neurons, config, rng
        )
        if not trace.valid:
            return None
        try:
            value = ComplexityService.complexity_approx(CovarianceModel.from_matrix(trace.matrix))
        except DegenerateCovarianceError:
            return None
        return value if math.isfinite(value) else None
