"""Tests for complexity service."""

import math
from itertools import combinations

import numpy as np
import pytest
from scipy import stats

from neuro_drift.core.config import ComplexityConfig, NeuronFilter
from neuro_drift.core.errors import DegenerateCovarianceError
from neuro_drift.core.models import CovarianceModel
from neuro_drift.core.services import ComplexityService
from neuro_drift.core.services.complexity_service import (
    DEGENERATE_COVARIANCE,
    INSUFFICIENT_SAMPLES,
)


def random_covariance(rng: np.random.Generator, n: int) -> np.ndarray:
    """正定値の共分散行列."""
    a = rng.normal(size=(n, n))
    return a @ a.T + n * np.eye(n)


def scipy_entropy(covariance: np.ndarray) -> float:
    """scipy で求めたガウスエントロピー（bit）."""
    return stats.multivariate_normal(cov=covariance).entropy() / math.log(2.0)


def enumerate_complexity(covariance: np.ndarray) -> float:
    """部分集合を列挙する別実装."""
    n = covariance.shape[0]
    total = scipy_entropy(covariance)
    value = 0.0
    for k in range(1, n + 1):
        subsets = list(combinations(range(n), k))
        mean = sum(scipy_entropy(covariance[np.ix_(s, s)]) for s in subsets) / len(subsets)
        value += mean - k / n * total
    return value


def two_block(rho: float) -> np.ndarray:
    """ブロック内相関 ρ、ブロック間相関 0 の 4 変数共分散."""
    block = np.array([[1.0, rho], [rho, 1.0]])
    covariance = np.zeros((4, 4))
    covariance[:2, :2] = block
    covariance[2:, 2:] = block
    return covariance


class TestGaussianEntropy:
    """ガウスエントロピーのテスト."""

    def test_unit_variance(self):
        """分散1の1変数で ½·log₂(2πe) ≈ 2.0471 bit になることを確認."""
        model = CovarianceModel.from_covariance(np.eye(1))
        assert ComplexityService.gaussian_entropy(model) == pytest.approx(2.0471, abs=1e-4)

    def test_identity_is_additive(self):
        """単位共分散の2変数で1変数の2倍になることを確認."""
        model = CovarianceModel.from_covariance(np.eye(2))
        assert ComplexityService.gaussian_entropy(model) == pytest.approx(4.0942, abs=1e-4)

    def test_scaling_adds_log2(self):
        """1変数を c 倍すると log₂(c) bit 増えることを確認."""
        rng = np.random.default_rng(0)
        covariance = random_covariance(rng, 3)
        scale = np.diag([4.0, 1.0, 1.0])
        base = ComplexityService.gaussian_entropy(CovarianceModel.from_covariance(covariance))
        scaled = ComplexityService.gaussian_entropy(
            CovarianceModel.from_covariance(scale @ covariance @ scale)
        )
        assert scaled - base == pytest.approx(2.0, abs=1e-9)

    def test_matches_scipy(self):
        """scipy の多変量正規分布のエントロピーと一致することを確認."""
        rng = np.random.default_rng(1)
        for n in range(1, 8):
            covariance = random_covariance(rng, n)
            model = CovarianceModel.from_covariance(covariance)
            assert ComplexityService.gaussian_entropy(model) == pytest.approx(
                scipy_entropy(covariance), abs=1e-9
            )

    def test_subset(self):
        """部分集合のエントロピーが部分共分散から計算されることを確認."""
        model = CovarianceModel.from_covariance(np.diag([1.0, 4.0, 16.0]))
        assert ComplexityService.gaussian_entropy(model, (1,)) == pytest.approx(2.0471 + 1.0, abs=1e-4)

    def test_degenerate(self):
        """正定値でない共分散でエラーになることを確認."""
        model = CovarianceModel.from_covariance(np.array([[1.0, 1.0], [1.0, 1.0]]))
        with pytest.raises(DegenerateCovarianceError):
            ComplexityService.gaussian_entropy(model)


class TestIntegration:
    """統合度のテスト."""

    def test_diagonal_is_zero(self):
        """対角共分散で統合度が 0 になることを確認."""
        model = CovarianceModel.from_covariance(np.diag([1.0, 2.0, 3.0]))
        assert ComplexityService.integration(model) == pytest.approx(0.0, abs=1e-9)

    def test_bivariate_correlation(self):
        """相関 0.5 の2変数で −½·log₂(0.75) ≈ 0.2075 bit になることを確認."""
        model = CovarianceModel.from_covariance(np.array([[1.0, 0.5], [0.5, 1.0]]))
        assert ComplexityService.integration(model) == pytest.approx(0.2075, abs=1e-4)

    def test_scale_invariant(self):
        """各変数を別々に伸縮しても統合度が変わらないことを確認."""
        rng = np.random.default_rng(2)
        covariance = random_covariance(rng, 4)
        scale = np.diag([0.1, 3.0, 7.0, 1.5])
        base = ComplexityService.integration(CovarianceModel.from_covariance(covariance))
        scaled = ComplexityService.integration(
            CovarianceModel.from_covariance(scale @ covariance @ scale)
        )
        assert scaled == pytest.approx(base, abs=1e-9)
        assert base > 0.0


class TestComplexity:
    """複雑性（全列挙と一つ抜き近似）のテスト."""

    def test_diagonal_is_zero(self):
        """等分散の対角共分散でどちらの複雑性も 0 になることを確認."""
        model = CovarianceModel.from_covariance(2.5 * np.eye(6))
        assert ComplexityService.complexity_exact(model) == pytest.approx(0.0, abs=1e-9)
        assert ComplexityService.complexity_approx(model) == pytest.approx(0.0, abs=1e-9)

    def test_single_variable(self):
        """1変数ではどちらの複雑性も 0 になることを確認."""
        model = CovarianceModel.from_covariance(np.array([[3.0]]))
        assert ComplexityService.complexity_exact(model) == pytest.approx(0.0, abs=1e-12)
        assert ComplexityService.complexity_approx(model) == pytest.approx(0.0, abs=1e-12)

    def test_exact_matches_enumeration(self):
        """全列挙が別実装の列挙と 10⁻⁹ bit 以内で一致することを確認."""
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            covariance = random_covariance(rng, n)
            model = CovarianceModel.from_covariance(covariance)
            assert ComplexityService.complexity_exact(model) == pytest.approx(
                enumerate_complexity(covariance), abs=1e-9
            )

    def test_approx_matches_conditional_form(self):
        """一つ抜きの恒等式と条件付きエントロピーによる定義が一致することを確認."""
        rng = np.random.default_rng(4)
        for _ in range(100):
            n = int(rng.integers(2, 11))
            model = CovarianceModel.from_covariance(random_covariance(rng, n))
            definition = ComplexityService.gaussian_entropy(model) - float(
                ComplexityService.conditional_entropies(model).sum()
            )
            assert ComplexityService.complexity_approx(model) == pytest.approx(
                definition, abs=1e-9
            )

    def test_exact_over_limit(self):
        """列数が上限を超えると全列挙を計算しないことを確認."""
        model = CovarianceModel.from_covariance(np.eye(5))
        assert ComplexityService.complexity_exact(model, exact_limit=4) is None

    def test_permutation_invariant(self):
        """列の並べ替えで値が変わらないことを確認."""
        rng = np.random.default_rng(5)
        covariance = random_covariance(rng, 6)
        order = rng.permutation(6)
        base = CovarianceModel.from_covariance(covariance)
        permuted = CovarianceModel.from_covariance(covariance[np.ix_(order, order)])
        assert ComplexityService.complexity_approx(permuted) == pytest.approx(
            ComplexityService.complexity_approx(base), abs=1e-9
        )
        assert ComplexityService.complexity_exact(permuted) == pytest.approx(
            ComplexityService.complexity_exact(base), abs=1e-9
        )

    def test_rises_with_block_correlation(self):
        """2ブロック構造でブロック内相関が強いほど複雑性が上がることを確認."""
        values = [
            ComplexityService.complexity_approx(CovarianceModel.from_covariance(two_block(rho)))
            for rho in (0.1, 0.3, 0.5)
        ]
        assert values[0] < values[1] < values[2]
        assert values[2] == pytest.approx(-math.log2(1 - 0.25), abs=1e-9)

    def test_nonnegative_on_random_models(self):
        """正定値モデルで近似複雑性が負にならないことを確認."""
        rng = np.random.default_rng(6)
        for _ in range(50):
            model = CovarianceModel.from_covariance(random_covariance(rng, int(rng.integers(2, 10))))
            assert ComplexityService.complexity_approx(model) >= -1e-6


class TestBuildTrace:
    """トレース作成のテスト."""

    def test_processing_filter(self):
        """processing フィルタで入力ニューロン以外の列が選ばれることを確認."""
        is_input = np.array([True] * 24 + [False] * 10)
        recording = np.random.default_rng(0).random((100, 34))

        trace = ComplexityService.build_trace(
            recording, is_input, NeuronFilter.PROCESSING, ComplexityConfig(), np.random.default_rng(1)
        )

        assert trace.n == 10
        assert trace.valid
        assert not trace.is_input.any()

    def test_input_and_all_filters(self):
        """input / all フィルタの列数を確認."""
        is_input = np.array([True] * 3 + [False] * 2)
        recording = np.zeros((50, 5))
        config = ComplexityConfig()
        rng = np.random.default_rng(2)

        assert ComplexityService.build_trace(recording, is_input, NeuronFilter.INPUT, config, rng).n == 3
        assert ComplexityService.build_trace(recording, is_input, NeuronFilter.ALL, config, rng).n == 5

    def test_insufficient_samples(self):
        """T=15, n=10 でサンプル不足として無効になることを確認."""
        is_input = np.array([False] * 10)
        trace = ComplexityService.build_trace(
            np.random.default_rng(3).random((15, 10)),
            is_input,
            NeuronFilter.PROCESSING,
            ComplexityConfig(),
            np.random.default_rng(4),
        )
        assert not trace.valid
        assert trace.reason == INSUFFICIENT_SAMPLES

    def test_jitter_is_negligible(self):
        """ノイズによるエントロピーの変化が 10⁻³ bit 未満であることを確認."""
        rng = np.random.default_rng(5)
        recording = rng.multivariate_normal(np.zeros(4), random_covariance(rng, 4), size=500)
        is_input = np.zeros(4, dtype=bool)

        jittered = ComplexityService.build_trace(
            recording, is_input, NeuronFilter.ALL, ComplexityConfig(), np.random.default_rng(6)
        )
        clean = ComplexityService.build_trace(
            recording,
            is_input,
            NeuronFilter.ALL,
            ComplexityConfig(jitter_sigma=0.0),
            np.random.default_rng(6),
        )

        h_jittered = ComplexityService.gaussian_entropy(CovarianceModel.from_matrix(jittered.matrix))
        h_clean = ComplexityService.gaussian_entropy(CovarianceModel.from_matrix(clean.matrix))
        assert abs(h_jittered - h_clean) < 1e-3

    def test_shape_mismatch(self):
        """記録の列数と役割の数が異なるとエラーになることを確認."""
        with pytest.raises(ValueError, match="一致しません"):
            ComplexityService.build_trace(
                np.zeros((30, 4)),
                np.zeros(3, dtype=bool),
                NeuronFilter.ALL,
                ComplexityConfig(),
                np.random.default_rng(0),
            )


class TestComputeReport:
    """レポート作成のテスト."""

    def test_valid_report(self):
        """有効なトレースで全項目が有限値になることを確認."""
        rng = np.random.default_rng(7)
        recording = rng.multivariate_normal(np.zeros(5), random_covariance(rng, 5), size=200)
        trace = ComplexityService.build_trace(
            recording, np.zeros(5, dtype=bool), NeuronFilter.ALL, ComplexityConfig(), rng, agent_id=12
        )

        report = ComplexityService.compute_report(trace, ComplexityConfig())

        assert report.valid
        assert report.agent_id == 12
        assert report.n == 5
        assert report.samples == 200
        for value in (report.c_approx, report.c_exact, report.integration, report.entropy):
            assert math.isfinite(value)

    def test_degenerate_trace(self):
        """ノイズなしで定数列があると無効なレポートになることを確認."""
        recording = np.random.default_rng(8).random((40, 3))
        recording[:, 1] = 0.5
        config = ComplexityConfig(jitter_sigma=0.0)
        trace = ComplexityService.build_trace(
            recording, np.zeros(3, dtype=bool), NeuronFilter.ALL, config, np.random.default_rng(0)
        )

        report = ComplexityService.compute_report(trace, config)

        assert not report.valid
        assert report.reason == DEGENERATE_COVARIANCE
        assert report.c_approx is None

    def test_constant_column_cured_by_jitter(self):
        """ノイズを加えれば定数列があっても計算できることを確認."""
        recording = np.random.default_rng(9).random((40, 3))
        recording[:, 1] = 0.5
        config = ComplexityConfig()
        trace = ComplexityService.build_trace(
            recording, np.zeros(3, dtype=bool), NeuronFilter.ALL, config, np.random.default_rng(0)
        )

        assert ComplexityService.compute_report(trace, config).valid

    def test_exact_omitted_over_limit(self):
        """列数が上限を超えると全列挙の値が空になることを確認."""
        rng = np.random.default_rng(10)
        recording = rng.random((100, 4))
        config = ComplexityConfig(exact_limit=3)
        trace = ComplexityService.build_trace(
            recording, np.zeros(4, dtype=bool), NeuronFilter.ALL, config, rng
        )

        report = ComplexityService.compute_report(trace, config)

        assert report.valid
        assert report.c_exact is None
        assert report.c_approx is not None


class TestJitterRng:
    """ノイズ用乱数のテスト."""

    def test_deterministic_per_agent(self):
        """同じ seed と id から同じ乱数列が出ることを確認."""
        a = ComplexityService.jitter_rng(3, 17).normal(size=5)
        b = ComplexityService.jitter_rng(3, 17).normal(size=5)
        c = ComplexityService.jitter_rng(3, 18).normal(size=5)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestWindowComplexity:
    """直近ウィンドウの複雑性のテスト."""

    def test_short_window_is_none(self):
        """サンプル不足なら None を返すことを確認."""
        config = ComplexityConfig()
        value = ComplexityService.window_complexity(
            np.random.default_rng(0).random((5, 4)), np.zeros(4, dtype=bool), config, np.random.default_rng(1)
        )
        assert value is None

    def test_window_value(self):
        """十分なサンプルがあれば有限の値を返すことを確認."""
        config = ComplexityConfig()
        value = ComplexityService.window_complexity(
            np.random.default_rng(0).random((60, 4)),
            np.zeros(4, dtype=bool),
            config,
            np.random.default_rng(1),
        )
        assert value is not None
        assert math.isfinite(value)
