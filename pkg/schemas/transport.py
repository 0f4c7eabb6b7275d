# schemas/transport.py
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from schemas.common import ArrayModel, frozen_array


class Solver(str, Enum):
    SINKHORN = "sinkhorn"
    GREENKHORN = "greenkhorn"
    EXACT = "exact"


class SolverDiagnostics(BaseModel):
    """solver 진단값"""
    model_config = ConfigDict(frozen=True)

    solver: Solver
    iterations: int = Field(..., ge=0, description="sinkhorn: full pass 수, greenkhorn: 좌표 갱신 수")
    marginal_violation: float = Field(..., ge=0, description="max(‖Γ1-p‖₁, ‖Γᵀ1-q‖₁)")
    converged: bool
    log_domain: bool = False
    stalled: bool = Field(False, description="log-domain 반복이 더 줄지 않아 조기 종료")
    entropy: float | None = None


class TransportPlan(ArrayModel):
    """coupling Γ 와 marginal, 진단값"""
    gamma: np.ndarray = Field(..., description="(n, m) float64")
    p: np.ndarray
    q: np.ndarray
    epsilon: float = Field(..., ge=0, description="정확해(exact) 이면 0")
    diagnostics: SolverDiagnostics

    @field_validator("gamma", mode="before")
    @classmethod
    def _as_gamma(cls, value) -> np.ndarray:
        arr = frozen_array(value, np.float64)
        if arr.ndim != 2:
            raise ValueError("gamma must be 2-D")
        return arr

    @field_validator("p", "q", mode="before")
    @classmethod
    def _as_marginal(cls, value) -> np.ndarray:
        return frozen_array(value, np.float64).reshape(-1)

    @property
    def shape(self) -> tuple[int, int]:
        return int(self.gamma.shape[0]), int(self.gamma.shape[1])


class PlanSidecar(BaseModel):
    """plan 바이너리 옆에 두는 JSON 메타데이터"""
    p: list[float]
    q: list[float]
    epsilon: float
    diagnostics: SolverDiagnostics
    metric: str | None = None
    cost_scale: float = 1.0
