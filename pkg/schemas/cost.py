# schemas/cost.py
from enum import Enum

import numpy as np
from pydantic import Field, field_validator

from schemas.common import ArrayModel, frozen_array


class Metric(str, Enum):
    """ground metric"""
    L1 = "L1"
    L2 = "L2"
    L2_SQUARED = "L2_squared"
    COSINE = "cosine"


class CostMatrix(ArrayModel):
    """n x m 비음수 ground cost"""
    values: np.ndarray = Field(..., description="(n, m) float64")
    metric: Metric
    row_source: str = "rows"
    col_source: str = "cols"
    scale: float = Field(1.0, gt=0, description="max(C) 정규화 시 나눈 값, 아니면 1")

    @field_validator("values", mode="before")
    @classmethod
    def _as_matrix(cls, value) -> np.ndarray:
        arr = frozen_array(value, np.float64)
        if arr.ndim != 2:
            raise ValueError(f"cost matrix must be 2-D, got shape {arr.shape}")
        return arr

    @property
    def shape(self) -> tuple[int, int]:
        return int(self.values.shape[0]), int(self.values.shape[1])
