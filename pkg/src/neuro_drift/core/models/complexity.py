"""Activation-trace and complexity-report models."""

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field

from ..config import NeuronFilter


@dataclass(frozen=True, eq=False)
class ActivationTrace:
    """選択したニューロン列の生涯活性行列（T × n）."""

    agent_id: int
    birth_step: int
    death_step: int
    neuron_filter: NeuronFilter
    is_input: np.ndarray
    matrix: np.ndarray
    valid: bool = True
    reason: str | None = None

    @property
    def samples(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def n(self) -> int:
        return int(self.matrix.shape[1])


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    """トレースから推定したガウスモデル."""

    columns: tuple[int, ...]
    mean: np.ndarray
    covariance: np.ndarray
    samples: int

    @property
    def n(self) -> int:
        return len(self.columns)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "CovarianceModel":
        """T × n 行列から標本共分散を推定."""
        data = np.asarray(matrix, dtype=np.float64)
        covariance = np.atleast_2d(np.cov(data, rowvar=False, ddof=1))
        return cls(
            columns=tuple(range(data.shape[1])),
            mean=data.mean(axis=0),
            covariance=covariance,
            samples=int(data.shape[0]),
        )

    @classmethod
    def from_covariance(cls, covariance: np.ndarray, samples: int = 0) -> "CovarianceModel":
        """共分散行列を直接指定して作成（合成データ用）."""
        cov = np.atleast_2d(np.asarray(covariance, dtype=np.float64))
        return cls(
            columns=tuple(range(cov.shape[0])),
            mean=np.zeros(cov.shape[0]),
            covariance=cov,
            samples=samples,
        )


class ComplexityReport(BaseModel):
    """エージェント1体の複雑性計算結果（単位: bit）."""

    agent_id: int
    death_step: int
    neuron_filter: NeuronFilter = Field(..., alias="filter")
    n: int = Field(0, ge=0, description="列数")
    samples: int = Field(0, ge=0, description="サンプル数 T")
    c_approx: float | None = None
    c_exact: float | None = None
    integration: float | None = None
    entropy: float | None = None
    valid: bool = True
    reason: str | None = None

    model_config = {"populate_by_name": True}

    @classmethod
    def invalid(
        cls, trace: ActivationTrace, reason: str
    ) -> "ComplexityReport":
        """無効なトレースの結果."""
        return cls(
            agent_id=trace.agent_id,
            death_step=trace.death_step,
            neuron_filter=trace.neuron_filter,
            n=trace.n,
            samples=trace.samples,
            valid=False,
            reason=reason,
        )
