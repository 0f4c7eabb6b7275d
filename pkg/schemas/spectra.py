# schemas/spectra.py
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from schemas.common import ArrayModel, frozen_array


class Representation(str, Enum):
    """OT 입력 표현"""
    RAW = "raw"
    BISPECTRAL = "bispectral"
    POWER = "power"


class PolarImage(ArrayModel):
    """R x K 극좌표 격자 (행: 반지름 bin, 열: 각도 bin)"""
    grid: np.ndarray = Field(..., description="(R, K) float64")
    radial_spacing: float = Field(..., gt=0, description="반지름 bin 간격 (pixel)")

    @field_validator("grid", mode="before")
    @classmethod
    def _as_grid(cls, value) -> np.ndarray:
        arr = frozen_array(value, np.float64)
        if arr.ndim != 2:
            raise ValueError(f"polar grid must be 2-D, got shape {arr.shape}")
        return arr

    @property
    def R(self) -> int:
        return int(self.grid.shape[0])

    @property
    def K(self) -> int:
        return int(self.grid.shape[1])


class SpectralCoefficients(ArrayModel):
    """Z/KZ 푸리에 계수 f̂_0..f̂_{K-1}"""
    coeffs: np.ndarray

    @field_validator("coeffs", mode="before")
    @classmethod
    def _as_coeffs(cls, value) -> np.ndarray:
        arr = frozen_array(value, np.complex128)
        if arr.ndim != 1:
            raise ValueError("coefficients must be a 1-D vector")
        return arr

    @property
    def K(self) -> int:
        return int(self.coeffs.shape[0])


class Bispectrum1D(ArrayModel):
    """K x K 복소 bispectrum"""
    B: np.ndarray

    @field_validator("B", mode="before")
    @classmethod
    def _as_matrix(cls, value) -> np.ndarray:
        arr = frozen_array(value, np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"bispectrum must be square, got shape {arr.shape}")
        return arr


class BispectralFeature(ArrayModel):
    """반지름별 bispectrum 을 (real, imag) 쌍으로 펼쳐 이어붙인 벡터"""
    vec: np.ndarray
    R: int = Field(..., gt=0)
    K: int = Field(..., gt=0)

    @field_validator("vec", mode="before")
    @classmethod
    def _as_vector(cls, value) -> np.ndarray:
        return frozen_array(value, np.float64).reshape(-1)

    @model_validator(mode="after")
    def _check_length(self) -> "BispectralFeature":
        expected = 2 * self.R * self.K * self.K
        if self.vec.shape[0] != expected:
            raise ValueError(f"feature length {self.vec.shape[0]} != 2*R*K*K = {expected}")
        return self


class FeatureMatrix(ArrayModel):
    """데이터셋 전체 특징 행렬 (행 순서 = 이미지 순서)"""
    values: np.ndarray = Field(..., description="(n, d) float32")
    labels: np.ndarray = Field(..., description="(n,) int64")
    num_classes: int = Field(..., gt=0)
    representation: Representation
    R: int = Field(0, ge=0, description="raw 표현이면 0")
    K: int = Field(0, ge=0, description="raw 표현이면 0")

    @field_validator("values", mode="before")
    @classmethod
    def _as_values(cls, value) -> np.ndarray:
        arr = frozen_array(value, np.float32)
        if arr.ndim != 2:
            raise ValueError(f"feature matrix must be 2-D, got shape {arr.shape}")
        return arr

    @field_validator("labels", mode="before")
    @classmethod
    def _as_labels(cls, value) -> np.ndarray:
        return frozen_array(value, np.int64).reshape(-1)

    @model_validator(mode="after")
    def _check_rows(self) -> "FeatureMatrix":
        if self.values.shape[0] != self.labels.shape[0]:
            raise ValueError("feature rows and labels differ in length")
        return self


class FeatureSidecar(BaseModel):
    """특징 바이너리 옆에 두는 JSON 메타데이터 (라벨 포함)"""
    representation: Representation
    num_classes: int = Field(..., gt=0)
    labels: list[int]
    source: str | None = None
