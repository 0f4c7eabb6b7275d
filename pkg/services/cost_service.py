# services/cost_service.py
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.spatial.distance import cdist

from core.config import get_settings
from core.logging import get_logger, log_execution_time
from exceptions.error_messages import ErrorMessage
from exceptions.exceptions import AppException
from schemas.cost import CostMatrix, Metric

logger = get_logger(__name__)

_BYTES_PER_MB = 1024 * 1024


def block_rows(n_cols: int, dim: int, memory_mb: int) -> int:
    """블록당 (rows x m) 출력 + (rows x d) 입력 사본이 memory_mb 를 넘지 않는 행 수"""
    per_row = 8 * (n_cols + dim)
    return max(1, int(memory_mb * _BYTES_PER_MB // per_row))


def _zero_identical_rows(
    values: np.ndarray,
    X: np.ndarray,
    Y: np.ndarray,
    x_sq: np.ndarray,
    y_sq: np.ndarray,
) -> None:
    """전개식 상쇄 오차 범위 안의 후보 중 실제로 같은 행 쌍은 정확히 0"""
    bound = 8.0 * np.finfo(np.float64).eps * (x_sq[:, None] + y_sq[None, :])
    rows, cols = np.nonzero(values <= bound)
    for i, j in zip(rows, cols):
        if np.array_equal(X[i], Y[j]):
            values[i, j] = 0.0


def _block_cost(
    X: np.ndarray,
    Y: np.ndarray,
    metric: Metric,
    y_sq: np.ndarray,
    y_norm: np.ndarray,
) -> np.ndarray:
    if metric == Metric.L1:
        return cdist(X, Y, metric="cityblock")
    if metric == Metric.L2:
        return cdist(X, Y, metric="euclidean")
    if metric == Metric.L2_SQUARED:
        # ‖x‖² + ‖y‖² - 2x·y, 음수 반올림 오차는 0 으로
        x_sq = np.einsum("ij,ij->i", X, X)
        values = np.maximum(0.0, x_sq[:, None] + y_sq[None, :] - 2.0 * (X @ Y.T))
        _zero_identical_rows(values, X, Y, x_sq, y_sq)
        return values

    # cosine: 1 - x·y / (‖x‖‖y‖), [0, 2] 로 clip
    x_norm = np.sqrt(np.einsum("ij,ij->i", X, X))
    sim = (X @ Y.T) / np.outer(x_norm, y_norm)
    return np.clip(1.0 - sim, 0.0, 2.0)


@log_execution_time(logger)
def pairwise_cost(
    X: np.ndarray,
    Y: np.ndarray,
    metric: Metric | str = Metric.L1,
    block_size: int | None = None,
    normalize: bool = False,
    threads: int | None = None,
    row_source: str = "rows",
    col_source: str = "cols",
) -> CostMatrix:
    """
    n x m ground cost 행렬 (행 블록 단위 계산, float64 누적)

    Args:
        X, Y: (n, d), (m, d) 특징 행렬 (float32 여도 float64 로 올려 계산)
        metric: L1 | L2 | L2_squared | cosine
        block_size: 블록당 행 수 (None 이면 BOT_COST_MEMORY_MB 로 결정)
        normalize: True 면 max(C) 로 나눔
    """
    metric = Metric(metric)
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)

    if X.ndim != 2 or Y.ndim != 2:
        raise AppException(ErrorMessage.SHAPE_MISMATCH, f"expected 2-D inputs, got {X.shape} and {Y.shape}")
    if X.shape[0] == 0 or Y.shape[0] == 0:
        raise AppException(ErrorMessage.EMPTY_DATASET, f"cost inputs {X.shape} and {Y.shape}")
    if X.shape[1] != Y.shape[1]:
        raise AppException(ErrorMessage.SHAPE_MISMATCH, f"feature dims differ: {X.shape[1]} != {Y.shape[1]}")
    if not (np.isfinite(X).all() and np.isfinite(Y).all()):
        raise AppException(ErrorMessage.NON_FINITE_COST, "features contain NaN or inf")

    y_sq = np.einsum("ij,ij->i", Y, Y)
    y_norm = np.sqrt(y_sq)
    if metric == Metric.COSINE:
        zero_rows = np.flatnonzero(np.einsum("ij,ij->i", X, X) == 0.0)
        zero_cols = np.flatnonzero(y_sq == 0.0)
        if zero_rows.size or zero_cols.size:
            raise AppException(
                ErrorMessage.DEGENERATE_VECTOR,
                f"zero-norm rows={zero_rows[:5].tolist()} cols={zero_cols[:5].tolist()}",
            )

    settings = get_settings()
    n, m = X.shape[0], Y.shape[0]
    step = block_size or block_rows(m, X.shape[1], settings.BOT_COST_MEMORY_MB)
    starts = range(0, n, step)

    values = np.empty((n, m), dtype=np.float64)

    def fill_block(start: int) -> None:
        stop = min(start + step, n)
        values[start:stop] = _block_cost(X[start:stop], Y, metric, y_sq, y_norm)

    # 블록마다 서로 겹치지 않는 출력 영역에 기록
    workers = threads or settings.num_threads
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(fill_block, starts))

    scale = 1.0
    if normalize:
        max_value = float(values.max())
        if max_value > 0:
            scale = max_value
            values /= scale

    logger.info(
        f"cost matrix done | metric={metric.value}, shape={n}x{m}, block={step}, "
        f"max={float(values.max()):.6g}, scale={scale:.6g}"
    )
    return CostMatrix(
        values=values,
        metric=metric,
        row_source=row_source,
        col_source=col_source,
        scale=scale,
    )
