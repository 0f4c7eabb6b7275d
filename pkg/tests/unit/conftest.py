"""
Unit 테스트 전용 Fixtures

solver / 평가 테스트에서 공유하는 작은 cost, plan
(공통 합성 이미지는 tests/conftest.py 에 있음)
"""

import numpy as np
import pytest

from schemas.transport import Solver, SolverDiagnostics, TransportPlan


# ============================================
# cost / plan fixtures
# ============================================

@pytest.fixture
def random_cost():
    """6 x 5 균등분포 cost (uniform marginal 에서 비퇴화)"""
    return np.random.default_rng(11).uniform(0.0, 1.0, size=(6, 5))


@pytest.fixture
def identity_like_cost():
    """대각 0, 나머지 1"""
    return 1.0 - np.eye(4)


@pytest.fixture
def diagonal_plan():
    """Γ = I/4, 수렴한 sinkhorn 결과처럼 보이는 plan"""
    return TransportPlan(
        gamma=np.eye(4) / 4,
        p=np.full(4, 0.25),
        q=np.full(4, 0.25),
        epsilon=0.01,
        diagnostics=SolverDiagnostics(
            solver=Solver.SINKHORN, iterations=3, marginal_violation=0.0, converged=True
        ),
    )
