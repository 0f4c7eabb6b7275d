# schemas/evaluation.py
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, field_validator

from schemas.common import ArrayModel, frozen_array


class ClassAssignment(ArrayModel):
    """행별 argmax 클래스 배정과 클래스별 수송 질량 (ΓH)"""
    assigned: np.ndarray = Field(..., description="(n,) int64")
    mass_by_class: np.ndarray = Field(..., description="(n, num_classes) float64")

    @field_validator("assigned", mode="before")
    @classmethod
    def _as_assigned(cls, value) -> np.ndarray:
        return frozen_array(value, np.int64).reshape(-1)

    @field_validator("mass_by_class", mode="before")
    @classmethod
    def _as_mass(cls, value) -> np.ndarray:
        return frozen_array(value, np.float64)


class ClassConfusion(ArrayModel):
    """클래스 x 클래스 매칭 통계"""
    matrix: np.ndarray
    normalization: Literal["row", "mass", "count"]

    @field_validator("matrix", mode="before")
    @classmethod
    def _as_matrix(cls, value) -> np.ndarray:
        return frozen_array(value, np.float64)


class AccuracyReport(BaseModel):
    """평가 결과 JSON 요약"""
    dataset: str
    metric: str
    representation: str
    epsilon: float
    solver: str
    direction: str
    baseline: bool
    accuracy: float = Field(..., ge=0.0, le=1.0)
    per_class_accuracy: list[float | None] = Field(
        default_factory=list, description="소스 클래스별 정확도 (해당 클래스 없으면 None)"
    )
    converged: bool = True
    marginal_violation: float = 0.0


class DistanceStatsReport(BaseModel):
    """클래스 간 / 클래스 내 평균 거리 요약"""
    representation: str
    metric: str
    intra_mean: float = Field(..., description="대각선 평균")
    inter_mean: float = Field(..., description="비대각선 평균")
    intra_by_class: list[float]
    tightest_classes: list[int] = Field(..., description="intra 평균 거리 오름차순 클래스")
