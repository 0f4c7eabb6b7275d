"""
Cost Service Unit Tests

테스트 대상: services/cost_service.py
- pairwise_cost(): metric 별 ground cost, 블록 계산, 정규화, 입력 검증, 정의식 이중 루프 비교
- block_rows(): 메모리 상한 기반 블록 크기
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import cdist

from exceptions.error_messages import ErrorMessage
from exceptions.exceptions import AppException
from schemas.cost import Metric
from services.cost_service import block_rows, pairwise_cost


@pytest.fixture
def features():
    rng = np.random.default_rng(7)
    return rng.normal(size=(9, 5)), rng.normal(size=(6, 5))


# ============================================
# metric 정의 테스트
# ============================================

class TestMetrics:
    """metric 별 값 테스트"""

    @pytest.mark.parametrize(
        "metric, expected",
        [
            (Metric.L1, 2.0),
            (Metric.L2, np.sqrt(2.0)),
            (Metric.L2_SQUARED, 2.0),
            (Metric.COSINE, 1.0),
        ],
    )
    def test_직교_단위벡터(self, metric, expected):
        """x=(1,0), y=(0,1)"""
        C = pairwise_cost(np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]]), metric, threads=1)

        assert C.values[0, 0] == pytest.approx(expected)
        assert C.metric == metric

    @pytest.mark.parametrize(
        "metric, scipy_name",
        [(Metric.L1, "cityblock"), (Metric.L2, "euclidean"), (Metric.L2_SQUARED, "sqeuclidean"), (Metric.COSINE, "cosine")],
    )
    def test_scipy_와_일치(self, features, metric, scipy_name):
        X, Y = features

        C = pairwise_cost(X, Y, metric, threads=1)

        np.testing.assert_allclose(C.values, cdist(X, Y, scipy_name), rtol=1e-10, atol=1e-12)

    def test_자기자신_거리_0(self, features):
        X, _ = features

        C = pairwise_cost(X, X, Metric.L2_SQUARED, threads=1)

        assert np.all(C.values >= 0.0)
        np.testing.assert_allclose(np.diag(C.values), 0.0, atol=1e-12)

    @pytest.mark.parametrize("metric", list(Metric))
    def test_큰_스케일_동일행_대각_정확히_0(self, metric):
        """값이 1e4 규모인 고차원 행도 자기 자신과의 cost 는 0 (L2_squared 전개식 상쇄 포함)"""
        X = np.random.default_rng(3).uniform(0.0, 1.0, size=(20, 44_800)) * 1e4

        C = pairwise_cost(X, X, metric, threads=1)

        if metric == Metric.COSINE:
            np.testing.assert_allclose(np.diag(C.values), 0.0, atol=1e-12)
        else:
            assert np.all(np.diag(C.values) == 0.0)
        assert np.all(C.values[~np.eye(20, dtype=bool)] > 0.0)

    def test_다른_행렬의_같은_행도_0(self):
        """X 와 Y 가 다른 배열이어도 동일한 행 쌍은 0"""
        rng = np.random.default_rng(4)
        X = rng.uniform(0.0, 1e4, size=(5, 1000))
        Y = np.vstack([rng.uniform(0.0, 1e4, size=(2, 1000)), X[3:4].copy()])

        C = pairwise_cost(X, Y, Metric.L2_SQUARED, threads=1)

        assert C.values[3, 2] == 0.0
        assert np.count_nonzero(C.values == 0.0) == 1

    @pytest.mark.parametrize("metric", [Metric.L1, Metric.L2])
    def test_삼각부등식(self, metric):
        """L1, L2 는 거리 함수: C[i,k] <= C[i,j] + C[j,k]"""
        X = np.random.default_rng(8).normal(size=(12, 7))

        D = pairwise_cost(X, X, metric, threads=1).values

        assert np.all(D[:, None, :] <= D[:, :, None] + D[None, :, :] + 1e-12)

    def test_cosine_범위(self):
        """정반대 방향은 2"""
        C = pairwise_cost(np.array([[1.0, 1.0]]), np.array([[-2.0, -2.0], [3.0, 3.0]]), Metric.COSINE, threads=1)

        np.testing.assert_allclose(C.values, [[2.0, 0.0]], atol=1e-12)

    def test_문자열_metric(self, features):
        X, Y = features

        C = pairwise_cost(X, Y, "L2_squared", threads=1)

        assert C.metric == Metric.L2_SQUARED

    def test_float32_입력도_float64_계산(self, features):
        X, Y = features

        C = pairwise_cost(X.astype(np.float32), Y.astype(np.float32), Metric.L1, threads=1)

        assert C.values.dtype == np.float64
        np.testing.assert_allclose(C.values, cdist(X.astype(np.float32).astype(np.float64), Y.astype(np.float32).astype(np.float64), "cityblock"))


# ============================================
# 정의식 이중 루프 비교 테스트
# ============================================

def _double_loop_cost(X: np.ndarray, Y: np.ndarray, metric: Metric) -> np.ndarray:
    out = np.empty((X.shape[0], Y.shape[0]))
    for i, x in enumerate(X):
        for j, y in enumerate(Y):
            diff = x - y
            if metric == Metric.L1:
                out[i, j] = np.sum(np.abs(diff))
            elif metric == Metric.L2:
                out[i, j] = np.sqrt(np.sum(diff * diff))
            elif metric == Metric.L2_SQUARED:
                out[i, j] = np.sum(diff * diff)
            else:
                out[i, j] = 1.0 - np.dot(x, y) / (np.linalg.norm(x) * np.linalg.norm(y))
    return out


class TestDoubleLoopOracle:
    """행 쌍마다 정의식으로 계산한 값과 비교"""

    @given(
        n=st.integers(1, 50),
        m=st.integers(1, 50),
        d=st.integers(1, 64),
        seed=st.integers(0, 2**16),
        metric=st.sampled_from(list(Metric)),
    )
    @settings(max_examples=25, deadline=None)
    def test_정의식과_일치(self, n, m, d, seed, metric):
        rng = np.random.default_rng(seed)
        X, Y = rng.normal(size=(n, d)), rng.normal(size=(m, d))

        C = pairwise_cost(X, Y, metric, block_size=7, threads=2)

        expected = _double_loop_cost(X, Y, metric)
        scale = max(1.0, float(np.max(np.abs(expected))))
        np.testing.assert_allclose(C.values, expected, rtol=1e-6, atol=1e-6 * scale)


# ============================================
# 블록 계산 / 정규화 테스트
# ============================================

class TestBlocking:
    """블록 분할과 정규화 테스트"""

    @pytest.mark.parametrize("block_size", [1, 2, 4, 100])
    def test_블록_크기와_무관(self, features, block_size):
        """블록 크기, thread 수가 달라도 같은 행렬"""
        X, Y = features
        reference = pairwise_cost(X, Y, Metric.L2, threads=1).values

        C = pairwise_cost(X, Y, Metric.L2, block_size=block_size, threads=3)

        np.testing.assert_array_equal(C.values, reference)

    def test_max_정규화(self, features):
        """normalize=True 면 max 가 1, scale 에 나눈 값 기록"""
        X, Y = features
        raw = pairwise_cost(X, Y, Metric.L1, threads=1)

        C = pairwise_cost(X, Y, Metric.L1, normalize=True, threads=1)

        assert C.values.max() == pytest.approx(1.0)
        assert C.scale == pytest.approx(raw.values.max())
        np.testing.assert_allclose(C.values * C.scale, raw.values)

    def test_정규화_안하면_scale_1(self, features):
        X, Y = features

        assert pairwise_cost(X, Y, threads=1).scale == 1.0

    def test_블록_행수(self):
        """(rows x m) 출력 + (rows x d) 입력 float64 가 상한 이내"""
        rows = block_rows(n_cols=1000, dim=24, memory_mb=1)

        assert rows == (1024 * 1024) // (8 * 1024)
        assert block_rows(n_cols=10**9, dim=10**9, memory_mb=1) == 1

    def test_결과_불변(self, features):
        X, Y = features

        C = pairwise_cost(X, Y, threads=1)

        with pytest.raises(ValueError):
            C.values[0, 0] = 1.0


# ============================================
# 입력 검증 테스트
# ============================================

class TestValidation:
    """입력 검증 테스트"""

    def test_차원_불일치_에러(self):
        with pytest.raises(AppException) as exc_info:
            pairwise_cost(np.zeros((2, 3)), np.zeros((2, 4)))

        assert exc_info.value.error == ErrorMessage.SHAPE_MISMATCH

    def test_빈_입력_에러(self):
        with pytest.raises(AppException) as exc_info:
            pairwise_cost(np.zeros((0, 3)), np.zeros((2, 3)))

        assert exc_info.value.error == ErrorMessage.EMPTY_DATASET

    def test_nan_입력_에러(self):
        X = np.ones((2, 2))
        X[1, 0] = np.nan

        with pytest.raises(AppException) as exc_info:
            pairwise_cost(X, np.ones((2, 2)))

        assert exc_info.value.error == ErrorMessage.NON_FINITE_COST

    def test_cosine_영벡터_에러(self):
        """cosine 은 norm 0 벡터를 거부"""
        with pytest.raises(AppException) as exc_info:
            pairwise_cost(np.ones((2, 2)), np.array([[0.0, 0.0], [1.0, 0.0]]), Metric.COSINE)

        assert exc_info.value.error == ErrorMessage.DEGENERATE_VECTOR

    def test_알수없는_metric(self):
        with pytest.raises(ValueError):
            pairwise_cost(np.ones((1, 1)), np.ones((1, 1)), "chebyshev")
